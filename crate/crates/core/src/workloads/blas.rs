//! Reference-style BLAS kernels. Inputs follow the OpenBLAS benchmark
//! convention of uniform values in `[-0.5, 0.5)`.

use rand::Rng;

use super::MulCtx;

fn uniform_vec<R: Rng>(rng: &mut R, len: usize) -> Vec<f32> {
    (0..len).map(|_| rng.gen::<f32>() - 0.5).collect()
}

pub struct AxpbyInput {
    pub alpha: f32,
    pub beta: f32,
    pub x: Vec<f32>,
    pub y: Vec<f32>,
}

impl AxpbyInput {
    pub fn generate<R: Rng>(n: usize, rng: &mut R) -> Self {
        AxpbyInput { alpha: 1.7, beta: -0.3, x: uniform_vec(rng, n), y: uniform_vec(rng, n) }
    }
}

/// `y = alpha * x + beta * y`
pub fn axpby(input: &AxpbyInput, ctx: &mut MulCtx) -> Vec<f32> {
    input
        .x
        .iter()
        .zip(&input.y)
        .map(|(&x, &y)| ctx.mul(input.alpha, x) + ctx.mul(input.beta, y))
        .collect()
}

/// Two square row-major matrices.
pub struct MatrixPair {
    pub n: usize,
    pub a: Vec<f32>,
    pub b: Vec<f32>,
}

impl MatrixPair {
    pub fn generate<R: Rng>(n: usize, rng: &mut R) -> Self {
        MatrixPair { n, a: uniform_vec(rng, n * n), b: uniform_vec(rng, n * n) }
    }
}

/// `C = A * B`, i-k-j loop order, accumulating into zeroed `C`.
pub fn gemm(input: &MatrixPair, ctx: &mut MulCtx) -> Vec<f32> {
    let n = input.n;
    let mut c = vec![0.0f32; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = input.a[i * n + k];
            let b_row = &input.b[k * n..(k + 1) * n];
            let c_row = &mut c[i * n..(i + 1) * n];
            for (cij, &bkj) in c_row.iter_mut().zip(b_row) {
                *cij += ctx.mul(aik, bkj);
            }
        }
    }
    c
}

/// Lower-triangular system `L x = b`. Off-diagonal entries are scaled to
/// `[-sqrt(3/n), sqrt(3/n))` and the diagonal lies in `[1, 2)`, which keeps
/// forward substitution from growing exponentially.
pub struct TriangularSystem {
    pub n: usize,
    pub l: Vec<f32>,
    pub b: Vec<f32>,
}

impl TriangularSystem {
    pub fn generate<R: Rng>(n: usize, rng: &mut R) -> Self {
        let spread = 2.0 * (3.0 / n as f32).sqrt();
        let mut l = vec![0.0f32; n * n];
        for i in 0..n {
            for j in 0..i {
                l[i * n + j] = (rng.gen::<f32>() - 0.5) * spread;
            }
            l[i * n + i] = 1.0 + rng.gen::<f32>();
        }
        TriangularSystem { n, l, b: uniform_vec(rng, n) }
    }
}

/// Forward substitution. Divisions stay native.
pub fn trsv(input: &TriangularSystem, ctx: &mut MulCtx) -> Vec<f32> {
    let n = input.n;
    let mut x = vec![0.0f32; n];
    for i in 0..n {
        let mut acc = input.b[i];
        for (j, &xj) in x[..i].iter().enumerate() {
            acc -= ctx.mul(input.l[i * n + j], xj);
        }
        x[i] = acc / input.l[i * n + i];
    }
    x
}

/// A batch of `n` independent length-`n` vector pairs.
pub struct DotBatch {
    pub n: usize,
    pub x: Vec<f32>,
    pub y: Vec<f32>,
}

impl DotBatch {
    pub fn generate<R: Rng>(n: usize, rng: &mut R) -> Self {
        DotBatch { n, x: uniform_vec(rng, n * n), y: uniform_vec(rng, n * n) }
    }
}

/// One dot product per vector pair, sequential accumulation.
pub fn dot(input: &DotBatch, ctx: &mut MulCtx) -> Vec<f32> {
    input
        .x
        .chunks(input.n)
        .zip(input.y.chunks(input.n))
        .map(|(x, y)| x.iter().zip(y).fold(0.0f32, |acc, (&a, &b)| acc + ctx.mul(a, b)))
        .collect()
}

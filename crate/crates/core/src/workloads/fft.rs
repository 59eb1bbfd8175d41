//! Iterative radix-2 decimation-in-time FFT over binary32 complex values.

use rand::Rng;

use super::MulCtx;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Complex {
    pub re: f32,
    pub im: f32,
}

impl Complex {
    #[inline]
    fn add(self, o: Complex) -> Complex {
        Complex { re: self.re + o.re, im: self.im + o.im }
    }

    #[inline]
    fn sub(self, o: Complex) -> Complex {
        Complex { re: self.re - o.re, im: self.im - o.im }
    }

    #[inline]
    fn mul(self, o: Complex, ctx: &mut MulCtx) -> Complex {
        Complex {
            re: ctx.mul(self.re, o.re) - ctx.mul(self.im, o.im),
            im: ctx.mul(self.re, o.im) + ctx.mul(self.im, o.re),
        }
    }
}

pub struct FftInput {
    pub signal: Vec<Complex>,
    /// `exp(-2 pi i j / len)` for `j < len / 2`, computed in binary64 and
    /// rounded once.
    pub twiddles: Vec<Complex>,
}

impl FftInput {
    /// `len` must be a power of two.
    pub fn generate<R: Rng>(len: usize, rng: &mut R) -> Self {
        assert!(len.is_power_of_two());
        let signal = (0..len)
            .map(|_| Complex { re: rng.gen_range(-1.0f32..1.0), im: rng.gen_range(-1.0f32..1.0) })
            .collect();
        let twiddles = (0..len / 2)
            .map(|j| {
                let angle = -2.0 * std::f64::consts::PI * j as f64 / len as f64;
                Complex { re: angle.cos() as f32, im: angle.sin() as f32 }
            })
            .collect();
        FftInput { signal, twiddles }
    }
}

fn bit_reverse_permute(data: &mut [Complex]) {
    let n = data.len();
    let bits = n.trailing_zeros();
    if bits == 0 {
        return;
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            data.swap(i, j);
        }
    }
}

/// Forward transform; output is interleaved `[re0, im0, re1, im1, ...]`.
pub fn run(input: &FftInput, ctx: &mut MulCtx) -> Vec<f32> {
    let mut data = input.signal.clone();
    let n = data.len();
    bit_reverse_permute(&mut data);
    let mut half = 1;
    while half < n {
        let stride = n / (2 * half);
        for start in (0..n).step_by(2 * half) {
            for j in 0..half {
                let w = input.twiddles[j * stride];
                let t = w.mul(data[start + j + half], ctx);
                let u = data[start + j];
                data[start + j] = u.add(t);
                data[start + j + half] = u.sub(t);
            }
        }
        half *= 2;
    }
    data.iter().flat_map(|c| [c.re, c.im]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::NativeMul;

    #[test]
    fn matches_direct_dft() {
        let input = FftInput::generate(64, &mut crate::metrics::block_rng(2, 0));
        let mut ctx = MulCtx::new(&NativeMul);
        let out = run(&input, &mut ctx);
        let n = input.signal.len();
        for k in 0..n {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (t, x) in input.signal.iter().enumerate() {
                let a = -2.0 * std::f64::consts::PI * (k * t) as f64 / n as f64;
                re += f64::from(x.re) * a.cos() - f64::from(x.im) * a.sin();
                im += f64::from(x.re) * a.sin() + f64::from(x.im) * a.cos();
            }
            assert!((f64::from(out[2 * k]) - re).abs() < 1e-4, "re[{k}]");
            assert!((f64::from(out[2 * k + 1]) - im).abs() < 1e-4, "im[{k}]");
        }
        // 4 real multiplies per butterfly, n/2 butterflies per stage
        assert_eq!(ctx.count(), 4 * (n as u64 / 2) * 6);
    }

    #[test]
    fn impulse_is_flat() {
        let mut signal = vec![Complex::default(); 8];
        signal[0] = Complex { re: 1.0, im: 0.0 };
        let mut input = FftInput::generate(8, &mut crate::metrics::block_rng(0, 0));
        input.signal = signal;
        let out = run(&input, &mut MulCtx::new(&NativeMul));
        for k in 0..8 {
            assert!((out[2 * k] - 1.0).abs() < 1e-6);
            assert!(out[2 * k + 1].abs() < 1e-6);
        }
    }
}

//! Substitution harness: each kernel runs once with native binary32
//! multiplication and once with every scalar product routed through a
//! [`MulFunction`], and the two outputs are compared.

pub mod blackscholes;
pub mod blas;
pub mod fft;
pub mod kmeans;
pub mod mlp;
pub mod pgm;
pub mod sobel;
pub mod trace;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::codec::RoundingMode;
use crate::error::{Error, Result};
use crate::format::{FixedPositFormat, PositFormat};
use crate::metrics::{block_rng, compare, psnr_from_mse, ErrorReport};
use crate::multiplier::{FixedPositMul, MulFunction, NativeMul};
use crate::posit::PositMultiplier;

use pgm::GrayImage;
use trace::OperandTrace;

/// Multiplication context handed to kernels: counts products and optionally
/// records their operands.
pub struct MulCtx<'a> {
    func: &'a dyn MulFunction,
    count: u64,
    trace: Option<&'a mut OperandTrace>,
}

impl<'a> MulCtx<'a> {
    pub fn new(func: &'a dyn MulFunction) -> Self {
        MulCtx { func, count: 0, trace: None }
    }

    pub fn with_trace(func: &'a dyn MulFunction, trace: &'a mut OperandTrace) -> Self {
        MulCtx { func, count: 0, trace: Some(trace) }
    }

    #[inline]
    pub fn mul(&mut self, a: f32, b: f32) -> f32 {
        self.count += 1;
        if let Some(t) = self.trace.as_deref_mut() {
            t.push(a, b);
        }
        self.func.mul(a, b)
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Workload {
    Axpby,
    Gemm,
    Trsv,
    Dot,
    Blackscholes,
    Fft,
    Kmeans,
    Sobel,
    MlpForward,
}

impl Workload {
    pub const ALL: [Workload; 9] = [
        Workload::Axpby,
        Workload::Gemm,
        Workload::Trsv,
        Workload::Dot,
        Workload::Blackscholes,
        Workload::Fft,
        Workload::Kmeans,
        Workload::Sobel,
        Workload::MlpForward,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Workload::Axpby => "axpby",
            Workload::Gemm => "gemm",
            Workload::Trsv => "trsv",
            Workload::Dot => "dot",
            Workload::Blackscholes => "blackscholes",
            Workload::Fft => "fft",
            Workload::Kmeans => "kmeans",
            Workload::Sobel => "sobel",
            Workload::MlpForward => "mlp_forward",
        }
    }

    /// Name of the headline quality metric.
    pub fn quality_metric(self) -> &'static str {
        match self {
            Workload::Kmeans => "rmse",
            Workload::Sobel => "psnr_db",
            Workload::MlpForward => "top1_agreement_pct",
            _ => "mean_rel_err_pct",
        }
    }
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Workload {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        Workload::ALL
            .into_iter()
            .find(|w| w.name() == s || (s == "mlp" && *w == Workload::MlpForward))
            .ok_or(Error::UnknownWorkload(s))
    }
}

/// Which multiplier replaces native binary32 multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Substitution {
    Reference,
    Fixed(FixedPositFormat),
    Posit(PositFormat),
}

impl Substitution {
    fn multiplier(self, rm: RoundingMode) -> Box<dyn MulFunction> {
        match self {
            Substitution::Reference => Box::new(NativeMul),
            Substitution::Fixed(f) => Box::new(FixedPositMul::new(f, rm)),
            Substitution::Posit(p) => Box::new(PositMultiplier::new(p, rm)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct WorkloadParams {
    /// Matrix order for gemm/trsv, vector length for axpby/dot, transform
    /// length for fft (rounded up to a power of two), option count for
    /// blackscholes, point count for kmeans, batch size for mlp_forward.
    /// Ignored by sobel.
    pub size: usize,
    pub seed: u64,
    pub rounding: RoundingMode,
    /// Sobel input; a 256x256 synthetic pattern when absent.
    pub image: Option<GrayImage>,
}

impl WorkloadParams {
    pub fn new(size: usize, seed: u64) -> Self {
        WorkloadParams { size, seed, rounding: RoundingMode::NearestEven, image: None }
    }
}

/// Side length of the default sobel input.
pub const SYNTHETIC_IMAGE_SIDE: usize = 256;

#[derive(Clone, Debug, Serialize)]
pub struct WorkloadResult {
    pub workload: String,
    pub format: String,
    pub quality_metric: String,
    pub quality: f64,
    pub error: ErrorReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top1_agreement_pct: Option<f64>,
    pub multiplications: u64,
    pub elapsed_ms: f64,
}

impl WorkloadResult {
    /// A number that grows as output quality degrades: mean relative error
    /// for the numeric kernels and mlp logits, RMSE for kmeans and sobel.
    pub fn quality_loss(&self) -> f64 {
        match self.quality_metric.as_str() {
            "rmse" | "psnr_db" => self.error.rmse,
            _ => self.error.mean_rel_err_pct,
        }
    }
}

/// Outputs of both runs alongside the summary.
pub struct WorkloadRun {
    pub result: WorkloadResult,
    pub reference: Vec<f32>,
    pub output: Vec<f32>,
    /// Output image dimensions for sobel.
    pub dims: Option<(usize, usize)>,
}

enum Inputs {
    Axpby(blas::AxpbyInput),
    Gemm(blas::MatrixPair),
    Trsv(blas::TriangularSystem),
    Dot(blas::DotBatch),
    Blackscholes(Vec<blackscholes::OptionSpec>),
    Fft(fft::FftInput),
    Kmeans(kmeans::KmeansInput),
    Sobel(GrayImage),
    Mlp(mlp::MlpInput),
}

impl Inputs {
    fn generate(workload: Workload, params: &WorkloadParams) -> Result<Self> {
        let n = params.size;
        if n == 0 && workload != Workload::Sobel {
            return Err(Error::InvalidSize("size must be at least 1".into()));
        }
        let rng = &mut block_rng(params.seed, workload as u64);
        Ok(match workload {
            Workload::Axpby => Inputs::Axpby(blas::AxpbyInput::generate(n, rng)),
            Workload::Gemm => Inputs::Gemm(blas::MatrixPair::generate(n, rng)),
            Workload::Trsv => Inputs::Trsv(blas::TriangularSystem::generate(n, rng)),
            Workload::Dot => Inputs::Dot(blas::DotBatch::generate(n, rng)),
            Workload::Blackscholes => Inputs::Blackscholes(blackscholes::generate(n, rng)),
            Workload::Fft => {
                let len = n.checked_next_power_of_two().filter(|&l| l >= 2).ok_or_else(|| {
                    Error::InvalidSize(format!("fft length {n} has no usable power of two"))
                })?;
                Inputs::Fft(fft::FftInput::generate(len, rng))
            }
            Workload::Kmeans => Inputs::Kmeans(kmeans::KmeansInput::generate(n, rng)),
            Workload::Sobel => Inputs::Sobel(
                params
                    .image
                    .clone()
                    .unwrap_or_else(|| GrayImage::synthetic(SYNTHETIC_IMAGE_SIDE, SYNTHETIC_IMAGE_SIDE)),
            ),
            Workload::MlpForward => Inputs::Mlp(mlp::MlpInput::generate(n, rng)),
        })
    }

    fn run(&self, ctx: &mut MulCtx) -> Vec<f32> {
        match self {
            Inputs::Axpby(i) => blas::axpby(i, ctx),
            Inputs::Gemm(i) => blas::gemm(i, ctx),
            Inputs::Trsv(i) => blas::trsv(i, ctx),
            Inputs::Dot(i) => blas::dot(i, ctx),
            Inputs::Blackscholes(i) => blackscholes::run(i, ctx),
            Inputs::Fft(i) => fft::run(i, ctx),
            Inputs::Kmeans(i) => kmeans::run(i, ctx),
            Inputs::Sobel(i) => sobel::run(i, ctx),
            Inputs::Mlp(i) => mlp::run(i, ctx),
        }
    }
}

/// Runs `workload` natively and under `sub`, recording the substituted run's
/// operands into `trace` when given.
pub fn run_workload_full(
    workload: Workload,
    sub: Substitution,
    params: &WorkloadParams,
    trace: Option<&mut OperandTrace>,
) -> Result<WorkloadRun> {
    let inputs = Inputs::generate(workload, params)?;

    let native = NativeMul;
    let mut ref_ctx = MulCtx::new(&native);
    let reference = inputs.run(&mut ref_ctx);

    let func = sub.multiplier(params.rounding);
    let start = Instant::now();
    let mut ctx = match trace {
        Some(t) => MulCtx::with_trace(func.as_ref(), t),
        None => MulCtx::new(func.as_ref()),
    };
    let output = inputs.run(&mut ctx);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let multiplications = ctx.count();
    debug_assert_eq!(multiplications, ref_ctx.count());

    let r64: Vec<f64> = reference.iter().map(|&v| f64::from(v)).collect();
    let o64: Vec<f64> = output.iter().map(|&v| f64::from(v)).collect();
    let mut error = compare(&r64, &o64)?;

    let mut top1 = None;
    let mut dims = None;
    let quality = match workload {
        Workload::Kmeans => error.rmse,
        Workload::Sobel => {
            let psnr = psnr_from_mse(error.rmse * error.rmse, 255.0);
            error.psnr_db = Some(psnr);
            if let Inputs::Sobel(img) = &inputs {
                dims = Some((img.width, img.height));
            }
            psnr
        }
        Workload::MlpForward => {
            let a = mlp::predictions(&reference);
            let b = mlp::predictions(&output);
            let agree = a.iter().zip(&b).filter(|(x, y)| x == y).count();
            let pct = 100.0 * agree as f64 / a.len().max(1) as f64;
            top1 = Some(pct);
            pct
        }
        _ => error.mean_rel_err_pct,
    };

    let format = match sub {
        Substitution::Reference => "reference".to_string(),
        _ => func.label(),
    };
    Ok(WorkloadRun {
        result: WorkloadResult {
            workload: workload.name().into(),
            format,
            quality_metric: workload.quality_metric().into(),
            quality,
            error,
            top1_agreement_pct: top1,
            multiplications,
            elapsed_ms,
        },
        reference,
        output,
        dims,
    })
}

pub fn run_workload(
    workload: Workload,
    sub: Substitution,
    params: &WorkloadParams,
    trace: Option<&mut OperandTrace>,
) -> Result<WorkloadResult> {
    run_workload_full(workload, sub, params, trace).map(|r| r.result)
}

//! Error and quality metrics.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{decoded_to_binary64, from_binary32, Decoded, Layout, RoundingMode};
use crate::error::{Error, Result};

/// PSNR reported for identical signals.
pub const PSNR_CAP_DB: f64 = 100.0;

/// Aggregated error statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub count: u64,
    pub max_rel_err_pct: f64,
    pub mean_rel_err_pct: f64,
    pub rmse: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psnr_db: Option<f64>,
    pub skipped: u64,
}

/// `100 * |x - x'| / |x|`, or `None` when `x` is zero or not finite.
pub fn relative_error_pct(x: f64, x_prime: f64) -> Option<f64> {
    if x == 0.0 || !x.is_finite() {
        return None;
    }
    Some(100.0 * (x - x_prime).abs() / x.abs())
}

pub fn rmse(reference: &[f64], approx: &[f64]) -> Result<f64> {
    if reference.len() != approx.len() {
        return Err(Error::LengthMismatch(reference.len(), approx.len()));
    }
    if reference.is_empty() {
        return Err(Error::LengthMismatch(0, 0));
    }
    let sum: f64 = reference.iter().zip(approx).map(|(r, a)| (r - a) * (r - a)).sum();
    Ok((sum / reference.len() as f64).sqrt())
}

/// `10 log10(peak^2 / mse)`, capped at [`PSNR_CAP_DB`].
pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        return PSNR_CAP_DB;
    }
    (10.0 * (peak * peak / mse).log10()).min(PSNR_CAP_DB)
}

/// PSNR between two images given as equally sized pixel buffers.
pub fn psnr_db(reference: &[f64], approx: &[f64], peak: f64) -> Result<f64> {
    let e = rmse(reference, approx)?;
    Ok(psnr_from_mse(e * e, peak))
}

/// Streaming accumulator behind [`ErrorReport`]. Merging is associative, so
/// partial results from disjoint sample ranges combine deterministically when
/// merged in a fixed order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrorAccumulator {
    rel_count: u64,
    rel_sum: f64,
    rel_max: f64,
    sq_sum: f64,
    sq_count: u64,
    skipped: u64,
}

impl ErrorAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, reference: f64, approx: f64) {
        let diff = reference - approx;
        if diff.is_finite() {
            self.sq_sum += diff * diff;
            self.sq_count += 1;
        }
        match relative_error_pct(reference, approx) {
            Some(e) if e.is_finite() => {
                self.rel_count += 1;
                self.rel_sum += e;
                self.rel_max = self.rel_max.max(e);
            }
            _ => self.skipped += 1,
        }
    }

    pub fn merge(&mut self, other: &ErrorAccumulator) {
        self.rel_count += other.rel_count;
        self.rel_sum += other.rel_sum;
        self.rel_max = self.rel_max.max(other.rel_max);
        self.sq_sum += other.sq_sum;
        self.sq_count += other.sq_count;
        self.skipped += other.skipped;
    }

    pub fn report(&self) -> ErrorReport {
        let mean = if self.rel_count == 0 { 0.0 } else { self.rel_sum / self.rel_count as f64 };
        let rmse = if self.sq_count == 0 { 0.0 } else { (self.sq_sum / self.sq_count as f64).sqrt() };
        ErrorReport {
            count: self.rel_count,
            max_rel_err_pct: self.rel_max,
            mean_rel_err_pct: mean,
            rmse,
            psnr_db: None,
            skipped: self.skipped,
        }
    }
}

/// Compares two output vectors element by element.
pub fn compare(reference: &[f64], approx: &[f64]) -> Result<ErrorReport> {
    if reference.len() != approx.len() {
        return Err(Error::LengthMismatch(reference.len(), approx.len()));
    }
    let mut acc = ErrorAccumulator::new();
    for (&r, &a) in reference.iter().zip(approx) {
        acc.push(r, a);
    }
    Ok(acc.report())
}

/// How sweep samples are drawn from the positive binary32 normals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleDistribution {
    /// Uniform unbiased exponent in `[-126, 127]`, uniform fraction bits.
    #[default]
    LogUniform,
    /// Uniform over the reals in `[2^-126, 2^127)`; nearly every sample lands
    /// in the top binade.
    UniformReal,
}

impl fmt::Display for SampleDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SampleDistribution::LogUniform => "log-uniform",
            SampleDistribution::UniformReal => "uniform-real",
        })
    }
}

impl FromStr for SampleDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-uniform" => Ok(SampleDistribution::LogUniform),
            "uniform-real" => Ok(SampleDistribution::UniformReal),
            _ => Err(Error::Parse(format!("unknown distribution `{s}`"))),
        }
    }
}

impl SampleDistribution {
    /// Draws one positive normal binary32 bit pattern.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        match self {
            SampleDistribution::LogUniform => {
                let biased: u32 = rng.gen_range(1..=254);
                let mantissa: u32 = rng.gen_range(0..1 << 23);
                (biased << 23) | mantissa
            }
            SampleDistribution::UniformReal => loop {
                let x = (rng.gen::<f64>() * 2f64.powi(127)) as f32;
                if x >= f32::MIN_POSITIVE && x < 2f32.powi(127) {
                    break x.to_bits();
                }
            },
        }
    }
}

/// Samples per independently seeded block. Block boundaries, not threads,
/// define the random streams.
const SWEEP_BLOCK: usize = 4096;

/// Seeded stream for block `index` of a run seeded with `seed`.
pub fn block_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Binary64 value of a decoded number; rounds only when the exact value is
/// wider than binary64.
pub fn decoded_value(d: &Decoded) -> f64 {
    match decoded_to_binary64(d) {
        Ok(v) => v,
        Err(_) => match d {
            Decoded::Normal(n) => {
                let mag = n.significand as f64 * 2f64.powi(n.scale - n.frac_bits as i32);
                if n.negative {
                    -mag
                } else {
                    mag
                }
            }
            _ => unreachable!("zero and NaR always convert"),
        },
    }
}

/// Converts `sample_count` seeded binary32 samples to `layout` and back and
/// aggregates the relative error.
pub fn sweep_conversion_error<L: Layout + Send + Sync>(
    layout: L,
    sample_count: usize,
    seed: u64,
    dist: SampleDistribution,
    rm: RoundingMode,
) -> Result<ErrorReport> {
    if sample_count == 0 {
        return Err(Error::InvalidSize("sample count must be at least 1".into()));
    }
    let blocks = sample_count.div_ceil(SWEEP_BLOCK);
    let partials: Vec<ErrorAccumulator> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = block_rng(seed, block as u64);
            let len = SWEEP_BLOCK.min(sample_count - block * SWEEP_BLOCK);
            let mut acc = ErrorAccumulator::new();
            for _ in 0..len {
                let x = dist.sample(&mut rng);
                let w = from_binary32(x, layout, rm);
                acc.push(f64::from(f32::from_bits(x)), decoded_value(&w.decode()));
            }
            acc
        })
        .collect();
    let mut total = ErrorAccumulator::new();
    for p in &partials {
        total.merge(p);
    }
    Ok(total.report())
}

//! European option pricing with the polynomial normal-CDF approximation used
//! by the AxBench/PARSEC kernel. Every product goes through the context;
//! `exp`, `ln` and `sqrt` stay native.

use rand::Rng;

use super::MulCtx;

const INV_SQRT_2PI: f32 = 0.398_942_3;

#[derive(Clone, Copy, Debug)]
pub struct OptionSpec {
    pub spot: f32,
    pub strike: f32,
    pub rate: f32,
    pub volatility: f32,
    pub time: f32,
    pub is_put: bool,
}

pub fn generate<R: Rng>(count: usize, rng: &mut R) -> Vec<OptionSpec> {
    (0..count)
        .map(|_| {
            let spot = rng.gen_range(10.0f32..100.0);
            OptionSpec {
                spot,
                strike: spot * rng.gen_range(0.8f32..1.2),
                rate: rng.gen_range(0.01f32..0.1),
                volatility: rng.gen_range(0.1f32..0.6),
                time: rng.gen_range(0.25f32..2.0),
                is_put: rng.gen_bool(0.5),
            }
        })
        .collect()
}

fn cndf(x: f32, ctx: &mut MulCtx) -> f32 {
    let negative = x < 0.0;
    let x = x.abs();

    let half_x = ctx.mul(-0.5, x);
    let exp_value = ctx.mul(half_x, x).exp();
    let n_prime = ctx.mul(exp_value, INV_SQRT_2PI);

    let k = 1.0 / (1.0 + ctx.mul(0.231_641_9, x));
    let k2 = ctx.mul(k, k);
    let k3 = ctx.mul(k2, k);
    let k4 = ctx.mul(k3, k);
    let k5 = ctx.mul(k4, k);

    let mut local1 = ctx.mul(k, 0.319_381_53);
    let mut local2 = ctx.mul(k2, -0.356_563_78);
    local2 += ctx.mul(k3, 1.781_477_9);
    local2 += ctx.mul(k4, -1.821_256);
    local2 += ctx.mul(k5, 1.330_274_4);
    local1 += local2;

    let tail = 1.0 - ctx.mul(local1, n_prime);
    if negative {
        1.0 - tail
    } else {
        tail
    }
}

pub fn price(opt: &OptionSpec, ctx: &mut MulCtx) -> f32 {
    let sqrt_time = opt.time.sqrt();
    let log_term = (opt.spot / opt.strike).ln();
    let v2 = ctx.mul(opt.volatility, opt.volatility);
    let power_term = ctx.mul(v2, 0.5);
    let mut d1 = ctx.mul(opt.rate + power_term, opt.time);
    d1 += log_term;
    let den = ctx.mul(opt.volatility, sqrt_time);
    d1 /= den;
    let d2 = d1 - den;

    let nd1 = cndf(d1, ctx);
    let nd2 = cndf(d2, ctx);
    let rt = ctx.mul(-opt.rate, opt.time);
    let discounted_strike = ctx.mul(opt.strike, rt.exp());

    if opt.is_put {
        ctx.mul(discounted_strike, 1.0 - nd2) - ctx.mul(opt.spot, 1.0 - nd1)
    } else {
        ctx.mul(opt.spot, nd1) - ctx.mul(discounted_strike, nd2)
    }
}

pub fn run(options: &[OptionSpec], ctx: &mut MulCtx) -> Vec<f32> {
    options.iter().map(|o| price(o, ctx)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::NativeMul;

    fn closed_form(o: &OptionSpec) -> f64 {
        // erf-free check against a high-precision CDF via numeric integration
        fn phi(x: f64) -> f64 {
            let steps = 20_000;
            let lo = -12.0;
            let h = (x - lo) / steps as f64;
            let f = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let mut s = f(lo) + f(x);
            for i in 1..steps {
                let t = lo + i as f64 * h;
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(t);
            }
            s * h / 3.0
        }
        let (s, k, r, v, t) = (
            f64::from(o.spot),
            f64::from(o.strike),
            f64::from(o.rate),
            f64::from(o.volatility),
            f64::from(o.time),
        );
        let d1 = ((s / k).ln() + (r + v * v / 2.0) * t) / (v * t.sqrt());
        let d2 = d1 - v * t.sqrt();
        if o.is_put {
            k * (-r * t).exp() * phi(-d2) - s * phi(-d1)
        } else {
            s * phi(d1) - k * (-r * t).exp() * phi(d2)
        }
    }

    #[test]
    fn prices_close_to_closed_form() {
        let mut ctx = MulCtx::new(&NativeMul);
        for opt in generate(50, &mut crate::metrics::block_rng(11, 0)) {
            let p = f64::from(price(&opt, &mut ctx));
            let exact = closed_form(&opt);
            // the polynomial CDF is good to about 1e-7 absolute
            assert!((p - exact).abs() < 1e-3 * opt.spot as f64, "{opt:?}: {p} vs {exact}");
        }
    }

    #[test]
    fn cndf_symmetry() {
        let mut ctx = MulCtx::new(&NativeMul);
        for x in [0.1f32, 0.7, 1.5, 3.0] {
            let s = cndf(x, &mut ctx) + cndf(-x, &mut ctx);
            assert!((s - 1.0).abs() < 1e-6);
        }
        assert!((cndf(0.0, &mut ctx) - 0.5).abs() < 1e-6);
    }
}

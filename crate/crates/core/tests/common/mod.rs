//! Independent oracles shared by the integration tests. Nothing here calls the
//! crate's codec; values are rebuilt from bit strings with plain `f64`
//! arithmetic.

#![allow(dead_code)]

use std::time::{Duration, Instant};

use fixposit::codec::{encode, RoundingMode};
use fixposit::format::validate;
use fixposit::metrics::decoded_value;
use fixposit::multiplier::{mul_datapath, mul_reference};
use fixposit::{FixedPositFormat, PositWord};

/// Value of a fixed-posit bit pattern, read directly off its fields.
/// `None` for NaR.
pub fn oracle_fixed(bits: u64, n: u32, es: u32, rs: u32) -> Option<f64> {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let bits = bits & mask;
    let sign_bit = 1u64 << (n - 1);
    if bits == 0 {
        return Some(0.0);
    }
    if bits == sign_bit {
        return None;
    }
    let negative = bits & sign_bit != 0;
    let mag = if negative { bits.wrapping_neg() & mask } else { bits };
    let bit = |i: u32| (mag >> (n - 2 - i)) & 1 == 1;

    let first = bit(0);
    let mut run = 1;
    while run < rs && bit(run) == first {
        run += 1;
    }
    let k: i64 = if first { run as i64 - 1 } else { -(run as i64) };

    let mut e: i64 = 0;
    for i in rs..rs + es {
        e = 2 * e + i64::from(bit(i));
    }
    let f = n - 1 - rs - es;
    let mut frac = 0.0f64;
    let mut weight = 0.5;
    for i in rs + es..rs + es + f {
        if bit(i) {
            frac += weight;
        }
        weight /= 2.0;
    }
    let scale = k * (1i64 << es) + e;
    let v = (1.0 + frac) * 2f64.powi(scale as i32);
    Some(if negative { -v } else { v })
}

/// True when the regime field is a run followed only by complement bits.
pub fn oracle_canonical(bits: u64, n: u32, rs: u32) -> bool {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let sign_bit = 1u64 << (n - 1);
    let bits = bits & mask;
    if bits == 0 || bits == sign_bit {
        return true;
    }
    let mag = if bits & sign_bit != 0 { bits.wrapping_neg() & mask } else { bits };
    let bit = |i: u32| (mag >> (n - 2 - i)) & 1 == 1;
    let first = bit(0);
    let mut i = 1;
    while i < rs && bit(i) == first {
        i += 1;
    }
    (i..rs).all(|j| bit(j) != first)
}

/// Every valid `(n, es, rs)` with `n` in `lo..=hi`.
pub fn all_formats(lo: u32, hi: u32) -> Vec<FixedPositFormat> {
    let mut out = Vec::new();
    for n in lo..=hi {
        for es in 0..n {
            for rs in 1..n {
                if let Ok(f) = validate(n, es, rs) {
                    out.push(f);
                }
            }
        }
    }
    out
}

pub fn word(bits: u64, fmt: FixedPositFormat) -> PositWord {
    PositWord::new(bits, fmt).unwrap()
}

/// Outcome of the exhaustive codec checks for one format.
#[derive(Default)]
pub struct CodecCheck {
    /// Property failures read over every bit pattern.
    pub all_words: Vec<String>,
    /// Property failures restricted to canonical words (regime run followed
    /// only by complement fill); aliases must still re-encode to an equal
    /// canonical word.
    pub canonical: Vec<String>,
    /// Failures that involve at least one non-canonical word.
    pub involving_alias: usize,
}

pub fn check_codec(fmt: FixedPositFormat) -> CodecCheck {
    let [n, es, rs] = fmt.as_triple();
    let mut out = CodecCheck::default();
    let count = 1u64 << n;
    let canon = |b: u64| oracle_canonical(b, n, rs);
    let both = |msg: String, out: &mut CodecCheck| {
        out.all_words.push(msg.clone());
        out.canonical.push(msg);
    };

    // decode agrees with the field-level oracle on every word
    for bits in 0..count {
        let got = decoded_value(&word(bits, fmt).decode());
        match oracle_fixed(bits, n, es, rs) {
            None if !got.is_nan() => both(format!("{fmt} {bits:#x}: NaR decoded as {got}"), &mut out),
            Some(v) if v != got => both(format!("{fmt} {bits:#x}: decoded {got}, oracle {v}"), &mut out),
            _ => {}
        }
    }

    // round trip
    for bits in 0..count {
        let w = word(bits, fmt);
        let back = PositWord::encode_decoded(&w.decode(), fmt, RoundingMode::NearestEven).bits();
        if back != bits {
            let msg = format!("{fmt} {bits:#x}: round trip gave {back:#x}");
            out.all_words.push(msg.clone());
            if canon(bits) {
                out.canonical.push(msg);
            } else {
                out.involving_alias += 1;
                if !canon(back) || oracle_fixed(back, n, es, rs) != oracle_fixed(bits, n, es, rs) {
                    out.canonical.push(format!("{fmt} {bits:#x}: alias re-encoded to unequal {back:#x}"));
                }
            }
        }
    }

    // strict monotonicity in two's-complement order, NaR excluded
    let mut order: Vec<i64> = (0..count).map(|b| word(b, fmt).as_signed()).collect();
    order.sort_unstable();
    let mut prev_any: Option<(f64, u64)> = None;
    let mut prev_canon: Option<(f64, u64)> = None;
    for s in order {
        let bits = (s as u64) & (count - 1);
        if oracle_fixed(bits, n, es, rs).is_none() {
            continue;
        }
        let v = decoded_value(&word(bits, fmt).decode());
        if let Some((p, pb)) = prev_any {
            if v <= p {
                out.all_words.push(format!("{fmt} {bits:#x}: value {v} not above {p} at {pb:#x}"));
                if !canon(bits) || !canon(pb) {
                    out.involving_alias += 1;
                }
            }
        }
        prev_any = Some((v, bits));
        if canon(bits) {
            if let Some((p, pb)) = prev_canon {
                if v <= p {
                    out.canonical.push(format!("{fmt} {bits:#x}: value {v} not above {p} at {pb:#x}"));
                }
            }
            prev_canon = Some((v, bits));
        }
    }

    // negation symmetry
    for bits in 0..count {
        let w = word(bits, fmt);
        let a = decoded_value(&w.negate().decode());
        let b = decoded_value(&w.decode());
        let ok = if b.is_nan() { a.is_nan() } else { a == -b };
        if !ok {
            both(format!("{fmt} {bits:#x}: negate gives {a}, expected {}", -b), &mut out);
        }
    }
    out
}

/// Canonical positive values of a format in increasing order with their bit
/// patterns.
pub fn positive_grid(fmt: FixedPositFormat) -> Vec<(f64, u64)> {
    let [n, es, rs] = fmt.as_triple();
    let maxpos = (1u64 << (n - 1)) - 1;
    let mut grid: Vec<(f64, u64)> = (1..=maxpos)
        .filter(|&b| oracle_canonical(b, n, rs))
        .map(|b| (oracle_fixed(b, n, es, rs).unwrap(), b))
        .collect();
    grid.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    grid
}

/// Nearest canonical word to `x > 0` by value, ties to the even bit
/// pattern, saturating to the end points.
pub fn nearest_positive(grid: &[(f64, u64)], x: f64) -> u64 {
    let idx = grid.partition_point(|&(v, _)| v < x);
    if idx == 0 {
        return grid[0].1;
    }
    if idx == grid.len() {
        return grid[grid.len() - 1].1;
    }
    let (lo, lo_bits) = grid[idx - 1];
    let (hi, hi_bits) = grid[idx];
    if hi == x {
        return hi_bits;
    }
    let dl = x - lo;
    let dh = hi - x;
    if dl < dh {
        lo_bits
    } else if dh < dl {
        hi_bits
    } else if lo_bits & 1 == 0 {
        lo_bits
    } else {
        hi_bits
    }
}

/// Product of two words computed by value: exact `f64` product, then the
/// nearest-value search above. Valid while products stay exact in `f64`.
pub fn oracle_mul(a: u64, b: u64, fmt: FixedPositFormat, grid: &[(f64, u64)]) -> u64 {
    let [n, es, rs] = fmt.as_triple();
    let mask = (1u64 << n) - 1;
    let (Some(x), Some(y)) = (oracle_fixed(a, n, es, rs), oracle_fixed(b, n, es, rs)) else {
        return 1u64 << (n - 1);
    };
    let p = x * y;
    if p == 0.0 {
        return 0;
    }
    let mag = nearest_positive(grid, p.abs());
    if p < 0.0 {
        mag.wrapping_neg() & mask
    } else {
        mag
    }
}

/// Mismatches between the datapath, the exact reference and (optionally) the
/// value oracle over all operand pairs.
pub fn exhaustive_mul_mismatches(fmt: FixedPositFormat, with_value_oracle: bool) -> (u64, Vec<String>) {
    let n = fmt.width();
    let count = 1u64 << n;
    let grid = if with_value_oracle { positive_grid(fmt) } else { Vec::new() };
    let rm = RoundingMode::NearestEven;
    let mut mismatches = 0u64;
    let mut examples = Vec::new();
    for a in 0..count {
        let wa = word(a, fmt);
        for b in 0..count {
            let wb = word(b, fmt);
            let d = mul_datapath(&wa, &wb).unwrap().bits();
            let r = mul_reference(&wa, &wb, rm).unwrap().bits();
            let o = if with_value_oracle { oracle_mul(a, b, fmt, &grid) } else { r };
            if d != r || r != o {
                mismatches += 1;
                if examples.len() < 5 {
                    examples.push(format!("{fmt} {a:#x}*{b:#x}: datapath {d:#x} reference {r:#x} oracle {o:#x}"));
                }
            }
        }
    }
    (mismatches, examples)
}

/// Largest relative error allowed for a round-to-nearest conversion into `f`
/// fraction bits.
pub fn half_ulp_bound(f: u32) -> f64 {
    2f64.powi(-(f as i32) - 1)
}

/// Runs `body`, returning its value and elapsed time.
pub fn timed<T>(body: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = body();
    (out, start.elapsed())
}

/// Encodes `value` (exact rational `num / 2^den_log2` scaled by `2^scale`)
/// with the crate's encoder.
pub fn lib_encode(neg: bool, scale: i32, num: u128, den_log2: u32, fmt: FixedPositFormat) -> u64 {
    encode(neg, scale, num, den_log2, fmt, RoundingMode::NearestEven).unwrap().bits()
}

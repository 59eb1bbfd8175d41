//! Fixed-posit multiplication.
//!
//! [`mul_datapath`] follows the hardware block structure stage by stage:
//!
//! 1. result sign is the XOR of the operand signs
//! 2. each operand's regime is decoded to `k` and shifted left by `es`
//! 3. the `(f+1)`-bit significands are multiplied and normalised, producing a
//!    carry when the product is in `[2, 4)`
//! 4. exponents, shifted `k` values and the carry are summed
//! 5. the summed scale is split back into regime and exponent and encoded
//!
//! Rounding (nearest-even) happens once, in the encoder stage. Operands are
//! handled as magnitudes after a conditional two's-complement negation.
//!
//! [`mul_reference`] computes the same function with no datapath structure:
//! decode to exact values, multiply integers, hand the product to the codec.

use serde::Serialize;

use crate::codec::{
    from_binary32, twos_complement, width_mask, Decoded, Layout, PositWord, RoundingMode, Word,
};
use crate::error::{Error, Result};
use crate::format::FixedPositFormat;

/// Intermediate values of one pass through the datapath.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DatapathTrace {
    /// Stage 1: result sign bit.
    pub sc: bool,
    pub ka: i32,
    pub kb: i32,
    /// Stage 2: `k << es` per operand.
    pub shifted_ka: i32,
    pub shifted_kb: i32,
    pub ea: i32,
    pub eb: i32,
    /// Stage 3: raw `(2f+2)`-bit significand product and normalisation carry.
    pub product: u128,
    pub carry: bool,
    /// Stage 4: `shifted_ka + ea + shifted_kb + eb + carry`.
    pub raw_scale: i32,
    /// Stage 5: rounding increment and whether it overflowed the fraction.
    pub round_up: bool,
    pub round_carry: bool,
    pub final_scale: i32,
    pub saturated: bool,
    /// Normalised, rounded fraction field of the result.
    pub fc: u64,
    pub kc: i32,
    pub ec: i32,
}

/// Fields of one decoded operand as the datapath decoder produces them.
#[derive(Clone, Copy, Debug)]
struct OperandFields {
    sign: bool,
    k: i32,
    shifted_k: i32,
    exponent: i32,
    fraction: u64,
}

/// Stage 2 decoder. The regime run is found by shifting the field left one
/// bit at a time while it still matches the leading bit.
fn decode_operand(fmt: FixedPositFormat, bits: u64) -> OperandFields {
    let n = fmt.width();
    let (es, rs, f) = (fmt.exponent_bits(), fmt.regime_bits(), fmt.fraction_bits());
    let sign = (bits >> (n - 1)) & 1 == 1;
    let mag = if sign { twos_complement(bits, n) } else { bits };

    let mut regime = (mag >> (es + f)) & width_mask(rs);
    let top = 1u64 << (rs - 1);
    let lead = regime & top != 0;
    let mut run = 0;
    while run < rs && (regime & top != 0) == lead {
        run += 1;
        regime <<= 1;
    }
    let k = if lead { run as i32 - 1 } else { -(run as i32) };

    OperandFields {
        sign,
        k,
        shifted_k: k << es,
        exponent: ((mag >> f) & width_mask(es)) as i32,
        fraction: mag & width_mask(f),
    }
}

/// Multiplies two fixed-posit words through the datapath model.
pub fn mul_datapath(a: &PositWord, b: &PositWord) -> Result<PositWord> {
    mul_datapath_traced(a, b, RoundingMode::NearestEven).map(|(w, _)| w)
}

/// [`mul_datapath`] with an explicit rounding mode and the stage trace. The
/// trace is `None` when a special value short-circuits the datapath.
pub fn mul_datapath_traced(
    a: &PositWord,
    b: &PositWord,
    rm: RoundingMode,
) -> Result<(PositWord, Option<DatapathTrace>)> {
    let fmt = a.layout();
    if b.layout() != fmt {
        return Err(Error::FormatMismatch(fmt.to_string(), b.layout().to_string()));
    }
    if a.is_nar() || b.is_nar() {
        return Ok((PositWord::nar(fmt), None));
    }
    if a.is_zero() || b.is_zero() {
        return Ok((PositWord::zero(fmt), None));
    }

    let n = fmt.width();
    let es = fmt.exponent_bits();
    let f = fmt.fraction_bits();
    let mut t = DatapathTrace::default();

    // 1
    let oa = decode_operand(fmt, a.bits());
    let ob = decode_operand(fmt, b.bits());
    t.sc = oa.sign ^ ob.sign;

    // 2
    t.ka = oa.k;
    t.kb = ob.k;
    t.shifted_ka = oa.shifted_k;
    t.shifted_kb = ob.shifted_k;
    t.ea = oa.exponent;
    t.eb = ob.exponent;

    // 3
    let hidden = 1u128 << f;
    let product = (hidden | u128::from(oa.fraction)) * (hidden | u128::from(ob.fraction));
    t.product = product;
    t.carry = product >> (2 * f + 1) & 1 == 1;
    // bits below the leading one: 2f+1 when carrying, 2f otherwise
    let tail_len = 2 * f + u32::from(t.carry);
    let tail = product & ((1u128 << tail_len) - 1);

    // 4
    t.raw_scale = t.shifted_ka + t.ea + t.shifted_kb + t.eb + i32::from(t.carry);

    // 5: keep f fraction bits, guard below them, sticky below that
    let drop = tail_len - f;
    let mut fc = (tail >> drop) as u64;
    let guard = (tail >> (drop - 1)) & 1 == 1;
    let sticky = tail & ((1u128 << (drop - 1)) - 1) != 0;
    t.round_up = match rm {
        RoundingMode::NearestEven => guard && (sticky || fc & 1 == 1),
        RoundingMode::TowardZero => false,
    };
    let mut scale = t.raw_scale;
    if t.round_up {
        fc += 1;
        if fc >> f != 0 {
            t.round_carry = true;
            fc = 0;
            scale += 1;
        }
    }

    let range = fmt.scale_range();
    let mag = if scale > range.max_scale {
        t.saturated = true;
        scale = range.max_scale;
        fc = width_mask(f);
        width_mask(n - 1)
    } else if scale < range.min_scale {
        t.saturated = true;
        scale = range.min_scale;
        fc = 1;
        1
    } else {
        let kc = scale >> es;
        let ec = scale & width_mask(es) as i32;
        let rs = fmt.regime_bits();
        let regime = if kc >= 0 {
            let ones = (kc + 1) as u32;
            width_mask(ones) << (rs - ones)
        } else {
            width_mask(rs - (-kc) as u32)
        };
        let assembled = (regime << (es + f)) | ((ec as u64) << f) | fc;
        if assembled == 0 {
            // would collide with zero
            t.saturated = true;
            fc = 1;
            1
        } else {
            assembled
        }
    };
    t.final_scale = scale;
    t.kc = scale >> es;
    t.ec = scale & width_mask(es) as i32;
    t.fc = fc;

    let bits = if t.sc { twos_complement(mag, n) } else { mag };
    Ok((PositWord::from_bits_truncating(bits, fmt), Some(t)))
}

/// Exact-arithmetic multiplication for any layout: decode both operands,
/// multiply significands as integers, encode once.
pub fn mul_reference<L: Layout>(a: &Word<L>, b: &Word<L>, rm: RoundingMode) -> Result<Word<L>> {
    let layout = a.layout();
    if b.layout() != layout {
        return Err(Error::FormatMismatch(layout.to_string(), b.layout().to_string()));
    }
    let (x, y) = match (a.decode(), b.decode()) {
        (Decoded::NaR, _) | (_, Decoded::NaR) => return Ok(Word::nar(layout)),
        (Decoded::Zero, _) | (_, Decoded::Zero) => return Ok(Word::zero(layout)),
        (Decoded::Normal(x), Decoded::Normal(y)) => (x, y),
    };
    let num = u128::from(x.significand) * u128::from(y.significand);
    let mut den_log2 = x.frac_bits + y.frac_bits;
    let mut scale = x.scale + y.scale;
    if num >> den_log2 >= 2 {
        // reinterpret the same integer over a doubled denominator
        den_log2 += 1;
        scale += 1;
    }
    let bits = layout.encode_normal(x.negative != y.negative, scale, num, den_log2, rm)?;
    Word::new(bits, layout)
}

/// A binary32 multiplication routine that kernels call for every product.
pub trait MulFunction: Sync {
    fn mul(&self, a: f32, b: f32) -> f32;

    /// Short name for reports.
    fn label(&self) -> String;
}

/// Native IEEE binary32 multiplication.
#[derive(Clone, Copy, Debug, Default)]
pub struct NativeMul;

impl MulFunction for NativeMul {
    #[inline]
    fn mul(&self, a: f32, b: f32) -> f32 {
        a * b
    }

    fn label(&self) -> String {
        "reference".into()
    }
}

/// binary32 multiplication routed through fixed-posit operands and the
/// datapath multiplier.
#[derive(Clone, Copy, Debug)]
pub struct FixedPositMul {
    pub fmt: FixedPositFormat,
    pub rm: RoundingMode,
}

impl FixedPositMul {
    pub fn new(fmt: FixedPositFormat, rm: RoundingMode) -> Self {
        FixedPositMul { fmt, rm }
    }
}

impl MulFunction for FixedPositMul {
    #[inline]
    fn mul(&self, a: f32, b: f32) -> f32 {
        mul_binary32_via(self.fmt, self.rm, a, b)
    }

    fn label(&self) -> String {
        self.fmt.to_string()
    }
}

/// `to_binary32(mul_datapath(from_binary32(a), from_binary32(b)))`.
pub fn mul_binary32_via(fmt: FixedPositFormat, rm: RoundingMode, a: f32, b: f32) -> f32 {
    let wa = from_binary32(a.to_bits(), fmt, rm);
    let wb = from_binary32(b.to_bits(), fmt, rm);
    let (wc, _) = mul_datapath_traced(&wa, &wb, rm).expect("operands share a format");
    f32::from_bits(wc.to_binary32(rm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::validate;

    fn fmt(n: u32, es: u32, rs: u32) -> FixedPositFormat {
        validate(n, es, rs).unwrap()
    }

    fn w(bits: u64, f: FixedPositFormat) -> PositWord {
        PositWord::new(bits, f).unwrap()
    }

    fn both(a: u64, b: u64, f: FixedPositFormat) -> u64 {
        let d = mul_datapath(&w(a, f), &w(b, f)).unwrap();
        let r = mul_reference(&w(a, f), &w(b, f), RoundingMode::NearestEven).unwrap();
        assert_eq!(d, r, "{a:#x} * {b:#x}");
        d.bits()
    }

    #[test]
    fn small_examples() {
        let f = fmt(8, 2, 2);
        assert_eq!(both(0x48, 0x4C, f), 0x54);
        assert_eq!(w(0x54, f).to_binary64().unwrap(), 6.0);
        assert_eq!(both(0x7F, 0x7F, f), 0x7F);
        assert_eq!(both(0xC0, 0x4D, f), 0xB3);
        assert_eq!(both(0x80, 0x4D, f), 0x80);
        assert_eq!(both(0x4D, 0x80, f), 0x80);
        assert_eq!(both(0x80, 0x00, f), 0x80);
        assert_eq!(both(0x00, 0x4D, f), 0x00);
        // smallest times smallest saturates to the smallest nonzero
        assert_eq!(both(0x01, 0x01, f), 0x01);
        assert_eq!(both(0xFF, 0x01, f), 0xFF);
    }

    #[test]
    fn trace_matches_hand_computation() {
        // 2.0 * 3.0 in (8,2,2): 2.0 = 0 10 01 000, 3.0 = 0 10 01 100
        let f = fmt(8, 2, 2);
        let (out, t) = mul_datapath_traced(&w(0x48, f), &w(0x4C, f), RoundingMode::NearestEven).unwrap();
        let t = t.unwrap();
        assert_eq!(out.bits(), 0x54);
        assert!(!t.sc);
        assert_eq!((t.ka, t.kb, t.shifted_ka, t.shifted_kb), (0, 0, 0, 0));
        assert_eq!((t.ea, t.eb), (1, 1));
        // 1.000 * 1.100 = 0b1000 * 0b1100 = 0b1100000 (value 1.5)
        assert_eq!(t.product, 0b110_0000);
        assert!(!t.carry);
        assert_eq!(t.raw_scale, 2);
        assert_eq!(t.fc, 0b100);
        assert_eq!((t.kc, t.ec), (0, 2));
        assert_eq!(t.raw_scale, t.shifted_ka + t.ea + t.shifted_kb + t.eb + i32::from(t.carry));

        // 3.25 * 3.25 = 10.5625: carry out of the significand product
        let (out, t) = mul_datapath_traced(&w(0x4D, f), &w(0x4D, f), RoundingMode::NearestEven).unwrap();
        let t = t.unwrap();
        assert!(t.carry);
        assert_eq!(t.raw_scale, 3);
        // 10.5625 = 1.3203125 * 2^3; nearest 3-bit fraction is 1.375 (0b011)
        assert_eq!(t.fc, 0b011);
        assert_eq!(out.to_binary64().unwrap(), 11.0);

        // negative operand flips the sign bit
        let (_, t) = mul_datapath_traced(&w(0xC0, f), &w(0x4D, f), RoundingMode::NearestEven).unwrap();
        let t = t.unwrap();
        assert!(t.sc);
        assert_eq!((t.ka, t.kb), (0, 0));
    }

    #[test]
    fn specials_have_no_trace() {
        let f = fmt(8, 2, 2);
        let (_, t) = mul_datapath_traced(&w(0x80, f), &w(0x40, f), RoundingMode::NearestEven).unwrap();
        assert!(t.is_none());
    }

    #[test]
    fn format_mismatch_is_an_error() {
        let a = w(0x40, fmt(8, 2, 2));
        let b = w(0x40, fmt(8, 3, 1));
        assert!(matches!(mul_datapath(&a, &b), Err(Error::FormatMismatch(..))));
        assert!(mul_reference(&a, &b, RoundingMode::NearestEven).is_err());
    }

    #[test]
    fn binary32_examples() {
        let rne = RoundingMode::NearestEven;
        assert_eq!(mul_binary32_via(fmt(32, 6, 2), rne, 1.5, 2.5), 3.75);
        let x = 1.0 + 2f32.powi(-10);
        assert_eq!(mul_binary32_via(fmt(18, 6, 2), rne, 1.0, x), 1.0);
        assert!(mul_binary32_via(fmt(32, 6, 2), rne, f32::INFINITY, 1.0).is_nan());
        assert_eq!(mul_binary32_via(fmt(32, 6, 2), rne, 0.0, 7.0), 0.0);
    }

    #[test]
    fn wide_format_does_not_overflow() {
        // f = 61: significand product needs 124 bits
        let f = fmt(64, 1, 1);
        let one = crate::codec::from_binary64(1.0, f, RoundingMode::NearestEven);
        let x = crate::codec::from_binary64(1.7, f, RoundingMode::NearestEven);
        assert_eq!(mul_datapath(&one, &x).unwrap(), x);
        let d = mul_datapath(&x, &x).unwrap();
        let r = mul_reference(&x, &x, RoundingMode::NearestEven).unwrap();
        assert_eq!(d, r);
    }
}

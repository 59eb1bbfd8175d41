//! Bit-exact encode/decode of fixed-posit words and conversion to and from
//! IEEE-754 binary32/binary64.
//!
//! Words are stored right-aligned in a `u64`. Negative values are the two's
//! complement of the whole N-bit word. All-zeros is zero and the sign bit
//! alone is NaR, as for standard posits.
//!
//! The regime field is exactly `rs` bits wide: a run of `m` identical bits
//! followed by complement fill. A field such as `010` (rs = 3) is not produced
//! by the encoder; the decoder reads it by its leading run (`k = -1`), so such
//! words alias the canonical `011` word.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::FixedPositFormat;

/// Rounding applied when a value carries more precision than the target.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoundingMode {
    /// Round to nearest, ties to the even significand.
    #[default]
    NearestEven,
    /// Truncate toward zero. Never used by the multiplier datapath; kept for
    /// conversion studies.
    TowardZero,
}

impl fmt::Display for RoundingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RoundingMode::NearestEven => "nearest-even",
            RoundingMode::TowardZero => "toward-zero",
        })
    }
}

impl FromStr for RoundingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest-even" | "rne" => Ok(RoundingMode::NearestEven),
            "toward-zero" | "rtz" | "truncate" => Ok(RoundingMode::TowardZero),
            _ => Err(Error::Parse(format!("unknown rounding mode `{s}`"))),
        }
    }
}

/// A finite nonzero value `±2^scale * significand / 2^frac_bits` with
/// `2^frac_bits <= significand < 2^(frac_bits + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Normal {
    pub negative: bool,
    pub scale: i32,
    pub significand: u64,
    pub frac_bits: u32,
}

impl Normal {
    /// Fraction field without the hidden bit.
    pub fn fraction(&self) -> u64 {
        self.significand - (1u64 << self.frac_bits)
    }

    pub fn negate(self) -> Self {
        Normal { negative: !self.negative, ..self }
    }

    /// Removes trailing zero fraction bits so equal values compare equal.
    pub fn reduced(self) -> Self {
        let tz = self.significand.trailing_zeros().min(self.frac_bits);
        Normal {
            significand: self.significand >> tz,
            frac_bits: self.frac_bits - tz,
            ..self
        }
    }
}

/// What a word denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decoded {
    Zero,
    NaR,
    Normal(Normal),
}

impl Decoded {
    /// Value equality that ignores how many fraction bits carried it.
    pub fn same_value(&self, other: &Decoded) -> bool {
        match (self, other) {
            (Decoded::Normal(a), Decoded::Normal(b)) => a.reduced() == b.reduced(),
            (a, b) => a == b,
        }
    }

    pub fn negate(self) -> Self {
        match self {
            Decoded::Normal(n) => Decoded::Normal(n.negate()),
            other => other,
        }
    }
}

/// A word layout: knows its width and how to map bit patterns to values.
pub trait Layout: Copy + Eq + fmt::Debug + fmt::Display {
    fn width(&self) -> u32;

    fn decode_bits(&self, bits: u64) -> Decoded;

    /// Encodes `±2^scale * num / 2^den_log2` with `num / 2^den_log2` in
    /// `[1, 2)`, rounding and saturating as the layout prescribes.
    fn encode_normal(
        &self,
        negative: bool,
        scale: i32,
        num: u128,
        den_log2: u32,
        rm: RoundingMode,
    ) -> Result<u64>;

    fn mask(&self) -> u64 {
        width_mask(self.width())
    }

    fn nar_bits(&self) -> u64 {
        1u64 << (self.width() - 1)
    }
}

/// An N-bit pattern together with the layout that gives it meaning.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Word<L> {
    bits: u64,
    layout: L,
}

/// Fixed-posit word.
pub type PositWord = Word<FixedPositFormat>;

impl<L: Layout> Word<L> {
    pub fn new(bits: u64, layout: L) -> Result<Self> {
        if bits & !layout.mask() != 0 {
            return Err(Error::WordTooWide { bits, width: layout.width() });
        }
        Ok(Word { bits, layout })
    }

    /// Keeps only the low `width` bits of `bits`.
    pub fn from_bits_truncating(bits: u64, layout: L) -> Self {
        Word { bits: bits & layout.mask(), layout }
    }

    pub fn zero(layout: L) -> Self {
        Word { bits: 0, layout }
    }

    pub fn nar(layout: L) -> Self {
        Word { bits: layout.nar_bits(), layout }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn layout(&self) -> L {
        self.layout
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn is_nar(&self) -> bool {
        self.bits == self.layout.nar_bits()
    }

    pub fn is_negative(&self) -> bool {
        self.bits & self.layout.nar_bits() != 0 && !self.is_nar()
    }

    /// The word read as an N-bit two's-complement integer.
    pub fn as_signed(&self) -> i64 {
        let shift = 64 - self.layout.width();
        ((self.bits << shift) as i64) >> shift
    }

    /// Two's complement modulo 2^N.
    pub fn negate(&self) -> Self {
        Word { bits: twos_complement(self.bits, self.layout.width()), layout: self.layout }
    }

    pub fn decode(&self) -> Decoded {
        self.layout.decode_bits(self.bits)
    }

    pub fn to_binary64(&self) -> Result<f64> {
        decoded_to_binary64(&self.decode())
    }

    pub fn to_binary32(&self, rm: RoundingMode) -> u32 {
        decoded_to_binary32(&self.decode(), rm)
    }

    /// Re-encodes a decoded value in this word's layout.
    pub fn encode_decoded(value: &Decoded, layout: L, rm: RoundingMode) -> Self {
        let bits = match value {
            Decoded::Zero => 0,
            Decoded::NaR => layout.nar_bits(),
            Decoded::Normal(n) => layout
                .encode_normal(n.negative, n.scale, u128::from(n.significand), n.frac_bits, rm)
                .expect("decoded significand is normalised"),
        };
        Word { bits, layout }
    }
}

impl<L: Layout> fmt::Display for Word<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.layout.width().div_ceil(4) as usize;
        write!(f, "0x{:0digits$X}", self.bits)
    }
}

pub(crate) fn width_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn twos_complement(bits: u64, n: u32) -> u64 {
    bits.wrapping_neg() & width_mask(n)
}

/// Shifts `x` right by `shift`, rounding the discarded bits.
pub(crate) fn round_shift_right(x: u128, shift: u32, rm: RoundingMode) -> u128 {
    if shift == 0 {
        return x;
    }
    if shift >= 128 {
        // x < 2^127 for every caller, so the discarded part is below one half.
        return 0;
    }
    let q = x >> shift;
    match rm {
        RoundingMode::TowardZero => q,
        RoundingMode::NearestEven => {
            let rem = x & ((1u128 << shift) - 1);
            let half = 1u128 << (shift - 1);
            if rem > half || (rem == half && q & 1 == 1) {
                q + 1
            } else {
                q
            }
        }
    }
}

/// Rounds a significand `num / 2^den_log2 in [1, 2)` to `target` fraction
/// bits. Returns the new significand (in `[2^target, 2^(target+1))`) and the
/// scale increment caused by a rounding carry.
pub(crate) fn round_significand(
    num: u128,
    den_log2: u32,
    target: u32,
    rm: RoundingMode,
) -> Result<(u128, i32)> {
    if den_log2 > 126 || num >> den_log2 != 1 {
        return Err(Error::SignificandOutOfRange { num, den_log2 });
    }
    if den_log2 <= target {
        return Ok((num << (target - den_log2), 0));
    }
    let q = round_shift_right(num, den_log2 - target, rm);
    if q >> (target + 1) != 0 {
        Ok((q >> 1, 1))
    } else {
        Ok((q, 0))
    }
}

impl Layout for FixedPositFormat {
    fn width(&self) -> u32 {
        FixedPositFormat::width(self)
    }

    fn decode_bits(&self, bits: u64) -> Decoded {
        decode_fixed(*self, bits)
    }

    fn encode_normal(
        &self,
        negative: bool,
        scale: i32,
        num: u128,
        den_log2: u32,
        rm: RoundingMode,
    ) -> Result<u64> {
        encode_fixed(*self, negative, scale, num, den_log2, rm)
    }
}

fn decode_fixed(fmt: FixedPositFormat, bits: u64) -> Decoded {
    let n = fmt.width();
    let bits = bits & width_mask(n);
    if bits == 0 {
        return Decoded::Zero;
    }
    let sign_bit = 1u64 << (n - 1);
    if bits == sign_bit {
        return Decoded::NaR;
    }
    let negative = bits & sign_bit != 0;
    let mag = if negative { twos_complement(bits, n) } else { bits };

    let (es, rs, f) = (fmt.exponent_bits(), fmt.regime_bits(), fmt.fraction_bits());
    let regime = (mag >> (es + f)) & width_mask(rs);
    let lead = (regime >> (rs - 1)) & 1;
    // leading run of `lead` bits inside the rs-bit field
    let aligned = regime << (64 - rs);
    let run = if lead == 1 { aligned.leading_ones() } else { aligned.leading_zeros() }.min(rs);
    let k = if lead == 1 { run as i32 - 1 } else { -(run as i32) };
    let exponent = ((mag >> f) & width_mask(es)) as i32;
    let fraction = mag & width_mask(f);

    Decoded::Normal(Normal {
        negative,
        scale: (k << es) + exponent,
        significand: (1u64 << f) | fraction,
        frac_bits: f,
    })
}

/// Regime field for `k`: `k + 1` ones (k >= 0) or `-k` zeros, complement fill.
pub(crate) fn regime_field(k: i32, rs: u32) -> u64 {
    if k >= 0 {
        let run = (k + 1) as u32;
        width_mask(run) << (rs - run)
    } else {
        let run = (-k) as u32;
        width_mask(rs - run)
    }
}

fn encode_fixed(
    fmt: FixedPositFormat,
    negative: bool,
    scale: i32,
    num: u128,
    den_log2: u32,
    rm: RoundingMode,
) -> Result<u64> {
    let n = fmt.width();
    let f = fmt.fraction_bits();
    let es = fmt.exponent_bits();
    let (sig, carry) = round_significand(num, den_log2, f, rm)?;
    let scale = i64::from(scale) + i64::from(carry);
    let range = fmt.scale_range();

    let mag = if scale > i64::from(range.max_scale) {
        width_mask(n - 1)
    } else if scale < i64::from(range.min_scale) {
        1
    } else {
        let scale = scale as i32;
        let k = scale >> es;
        let exponent = (scale - (k << es)) as u64;
        let fraction = (sig as u64) & width_mask(f);
        let assembled = (regime_field(k, fmt.regime_bits()) << (es + f)) | (exponent << f) | fraction;
        // the all-zero pattern is taken by zero; the smallest scale with an
        // empty fraction saturates to the smallest nonzero word
        assembled.max(1)
    };
    Ok(if negative { twos_complement(mag, n) } else { mag })
}

/// Decodes a fixed-posit word.
pub fn decode(w: &PositWord) -> Decoded {
    w.decode()
}

/// Encodes `±2^scale * significand_num / 2^significand_den_log2`.
pub fn encode(
    negative: bool,
    scale: i32,
    significand_num: u128,
    significand_den_log2: u32,
    fmt: FixedPositFormat,
    rm: RoundingMode,
) -> Result<PositWord> {
    let bits = encode_fixed(fmt, negative, scale, significand_num, significand_den_log2, rm)?;
    Ok(Word { bits, layout: fmt })
}

/// True when the word is the encoder's output for its own value.
pub fn is_canonical(w: &PositWord) -> bool {
    PositWord::encode_decoded(&w.decode(), w.layout(), RoundingMode::NearestEven) == *w
}

/// Converts a binary32 bit pattern. Zeros and subnormals become zero; NaN and
/// infinities become NaR.
pub fn from_binary32<L: Layout>(x: u32, layout: L, rm: RoundingMode) -> Word<L> {
    let negative = x >> 31 == 1;
    let biased = ((x >> 23) & 0xFF) as i32;
    let mantissa = x & 0x7F_FFFF;
    let bits = match biased {
        0 => 0,
        0xFF => layout.nar_bits(),
        _ => layout
            .encode_normal(negative, biased - 127, u128::from(mantissa | 0x80_0000), 23, rm)
            .expect("binary32 significand is normalised"),
    };
    Word { bits, layout }
}

/// Converts a binary64 value with the same special-value rules as
/// [`from_binary32`].
pub fn from_binary64<L: Layout>(x: f64, layout: L, rm: RoundingMode) -> Word<L> {
    let raw = x.to_bits();
    let negative = raw >> 63 == 1;
    let biased = ((raw >> 52) & 0x7FF) as i32;
    let mantissa = raw & ((1u64 << 52) - 1);
    let bits = match biased {
        0 => 0,
        0x7FF => layout.nar_bits(),
        _ => layout
            .encode_normal(negative, biased - 1023, u128::from(mantissa | (1u64 << 52)), 52, rm)
            .expect("binary64 significand is normalised"),
    };
    Word { bits, layout }
}

/// Exact binary64 value of a decoded number. Zero is `+0.0`, NaR is NaN.
pub fn decoded_to_binary64(value: &Decoded) -> Result<f64> {
    match value {
        Decoded::Zero => Ok(0.0),
        Decoded::NaR => Ok(f64::NAN),
        Decoded::Normal(n) => {
            let n = n.reduced();
            if n.frac_bits > 52 || !(-1022..=1023).contains(&n.scale) {
                return Err(Error::NotExact);
            }
            let mantissa = n.fraction() << (52 - n.frac_bits);
            let biased = (n.scale + 1023) as u64;
            Ok(f64::from_bits((u64::from(n.negative) << 63) | (biased << 52) | mantissa))
        }
    }
}

/// Correctly rounded binary32 bit pattern, subnormal outputs included. NaR is
/// the default quiet NaN; zero is `+0.0`.
pub fn decoded_to_binary32(value: &Decoded, rm: RoundingMode) -> u32 {
    const QNAN: u32 = 0x7FC0_0000;
    let n = match value {
        Decoded::Zero => return 0,
        Decoded::NaR => return QNAN,
        Decoded::Normal(n) => *n,
    };
    let sign = u32::from(n.negative) << 31;
    let sig = u128::from(n.significand);
    let f = n.frac_bits;

    if n.scale >= -126 {
        let (q, carry) = if f <= 23 {
            (sig << (23 - f), 0)
        } else {
            round_significand(sig, f, 23, rm).expect("normalised")
        };
        let scale = n.scale + carry;
        if scale > 127 {
            return sign
                | match rm {
                    RoundingMode::NearestEven => 0x7F80_0000,
                    RoundingMode::TowardZero => 0x7F7F_FFFF,
                };
        }
        return sign | (((scale + 127) as u32) << 23) | ((q as u32) & 0x7F_FFFF);
    }

    // subnormal range: the result is m * 2^-149 with m <= 2^23; m == 2^23 is
    // the smallest normal and has the same bit pattern
    let shift = i64::from(f) - (i64::from(n.scale) + 149);
    let m = if shift <= 0 {
        sig << (-shift) as u32
    } else {
        round_shift_right(sig, shift.min(128) as u32, rm)
    };
    sign | m as u32
}

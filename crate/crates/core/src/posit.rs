//! Standard `(n, es)` posits: variable-length regime with a terminating bit,
//! possibly truncated exponent, and whatever is left as fraction.
//!
//! Used as the comparison baseline for fixed-posits. There is no datapath
//! model here; multiplication goes through the exact reference path.

use crate::codec::{twos_complement, width_mask, Decoded, Layout, Normal, RoundingMode, Word};
use crate::error::{Error, Result};
use crate::format::PositFormat;
use crate::multiplier::{mul_reference, MulFunction};

/// A standard posit word.
pub type StdPositWord = Word<PositFormat>;

impl Layout for PositFormat {
    fn width(&self) -> u32 {
        PositFormat::width(self)
    }

    fn decode_bits(&self, bits: u64) -> Decoded {
        posit_decode_bits(*self, bits)
    }

    fn encode_normal(
        &self,
        negative: bool,
        scale: i32,
        num: u128,
        den_log2: u32,
        rm: RoundingMode,
    ) -> Result<u64> {
        posit_encode_bits(*self, negative, scale, num, den_log2, rm)
    }
}

fn posit_decode_bits(fmt: PositFormat, bits: u64) -> Decoded {
    let n = fmt.width();
    let es = fmt.exponent_bits();
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

    // the n-1 bits after the sign, left-aligned
    let body = mag << (64 - (n - 1));
    let lead = body >> 63;
    let run = if lead == 1 { body.leading_ones() } else { body.leading_zeros() }.min(n - 1);
    let k = if lead == 1 { run as i32 - 1 } else { -(run as i32) };

    // regime plus terminator; a run reaching the end has no terminator
    let consumed = (run + 1).min(n - 1);
    let remaining = n - 1 - consumed;
    let exp_avail = remaining.min(es);
    let frac_bits = remaining - exp_avail;
    let tail = mag & width_mask(remaining);
    // truncated exponent bits are the high-order bits of the exponent
    let exponent = ((tail >> frac_bits) << (es - exp_avail)) as i32;
    let fraction = tail & width_mask(frac_bits);

    Decoded::Normal(Normal {
        negative,
        scale: (k << es) + exponent,
        significand: (1u64 << frac_bits) | fraction,
        frac_bits,
    })
}

/// Collects the first `cap` bits of an unbounded bit string; later bits only
/// contribute to a sticky flag.
struct BitString {
    acc: u128,
    len: u32,
    cap: u32,
    sticky: bool,
}

impl BitString {
    fn new(cap: u32) -> Self {
        BitString { acc: 0, len: 0, cap, sticky: false }
    }

    fn push(&mut self, value: u128, nbits: u32) {
        if nbits == 0 {
            return;
        }
        let room = self.cap - self.len;
        if nbits <= room {
            self.acc = (self.acc << nbits) | value;
            self.len += nbits;
        } else {
            let dropped = nbits - room;
            if room > 0 {
                self.acc = (self.acc << room) | (value >> dropped);
                self.len = self.cap;
            }
            self.sticky |= value & ((1u128 << dropped) - 1) != 0;
        }
    }

    /// Left-aligns to `cap` bits.
    fn finish(self) -> (u128, bool) {
        (self.acc << (self.cap - self.len), self.sticky)
    }
}

fn posit_encode_bits(
    fmt: PositFormat,
    negative: bool,
    scale: i32,
    num: u128,
    den_log2: u32,
    rm: RoundingMode,
) -> Result<u64> {
    if den_log2 > 126 || num >> den_log2 != 1 {
        return Err(Error::SignificandOutOfRange { num, den_log2 });
    }
    let n = fmt.width();
    let es = fmt.exponent_bits();
    let maxpos = width_mask(n - 1);

    let mag = if scale >= fmt.max_scale() {
        maxpos
    } else if scale < fmt.min_scale() {
        1
    } else {
        let k = scale >> es;
        let exponent = (scale - (k << es)) as u128;
        // n - 1 body bits plus one guard bit
        let mut s = BitString::new(n);
        if k >= 0 {
            let run = (k + 1) as u32;
            s.push(((1u128 << run) - 1) << 1, run + 1);
        } else {
            s.push(1, (-k) as u32 + 1);
        }
        s.push(exponent, es);
        s.push(num & ((1u128 << den_log2) - 1), den_log2);
        let (acc, sticky) = s.finish();

        let body = (acc >> 1) as u64;
        let guard = acc & 1 == 1;
        let round_up = match rm {
            RoundingMode::NearestEven => guard && (sticky || body & 1 == 1),
            RoundingMode::TowardZero => false,
        };
        (body + u64::from(round_up)).clamp(1, maxpos)
    };
    Ok(if negative { twos_complement(mag, n) } else { mag })
}

/// Decodes a standard posit word.
pub fn posit_decode(w: &StdPositWord) -> Decoded {
    w.decode()
}

/// Encodes `±2^scale * num / 2^den_log2` as a standard posit.
pub fn posit_encode(
    negative: bool,
    scale: i32,
    num: u128,
    den_log2: u32,
    fmt: PositFormat,
    rm: RoundingMode,
) -> Result<StdPositWord> {
    let bits = posit_encode_bits(fmt, negative, scale, num, den_log2, rm)?;
    Ok(StdPositWord::from_bits_truncating(bits, fmt))
}

/// binary32 multiplication routed through `(n, es)` posit operands and an
/// exactly rounded posit product.
#[derive(Clone, Copy, Debug)]
pub struct PositMultiplier {
    pub fmt: PositFormat,
    pub rm: RoundingMode,
}

impl PositMultiplier {
    pub fn new(fmt: PositFormat, rm: RoundingMode) -> Self {
        PositMultiplier { fmt, rm }
    }
}

impl MulFunction for PositMultiplier {
    fn mul(&self, a: f32, b: f32) -> f32 {
        posit_mul_binary32_via(self.fmt, self.rm, a, b)
    }

    fn label(&self) -> String {
        format!("posit{}", self.fmt)
    }
}

pub fn posit_mul_binary32_via(fmt: PositFormat, rm: RoundingMode, a: f32, b: f32) -> f32 {
    use crate::codec::from_binary32;
    let pa = from_binary32(a.to_bits(), fmt, rm);
    let pb = from_binary32(b.to_bits(), fmt, rm);
    let pc = mul_reference(&pa, &pb, rm).expect("same format");
    f32::from_bits(pc.to_binary32(rm))
}

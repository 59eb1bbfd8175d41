//! Representation configurations and their derived properties.
//!
//! A fixed-posit layout is described by `(n, es, rs)`: total width, exponent
//! field width and regime field width. The fraction width is whatever is left
//! after the sign bit. A standard posit is described by `(n, es)` and has a
//! variable-length regime.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Widest word the codecs handle; words live right-aligned in a `u64`.
pub const MAX_WIDTH: u32 = 64;

/// Largest scale magnitude a format may span. Keeps scale arithmetic in `i32`.
const MAX_SCALE_SPAN: i64 = 1 << 30;

/// Binary32 normal exponent range, the target of the IEEE-equivalent search.
pub const BINARY32_MIN_EXP: i32 = -126;
pub const BINARY32_MAX_EXP: i32 = 127;

/// A fixed-posit layout `(n, es, rs)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FixedPositFormat {
    n: u32,
    es: u32,
    rs: u32,
}

impl FixedPositFormat {
    pub fn new(n: u32, es: u32, rs: u32) -> Result<Self> {
        validate(n, es, rs)
    }

    pub const fn width(&self) -> u32 {
        self.n
    }

    pub const fn exponent_bits(&self) -> u32 {
        self.es
    }

    pub const fn regime_bits(&self) -> u32 {
        self.rs
    }

    pub const fn fraction_bits(&self) -> u32 {
        self.n - 1 - self.rs - self.es
    }

    pub fn scale_range(&self) -> ScaleRange {
        scale_range(*self)
    }

    /// `[n, es, rs]`, the JSON shape of a format.
    pub fn as_triple(&self) -> [u32; 3] {
        [self.n, self.es, self.rs]
    }
}

impl fmt::Display for FixedPositFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n, self.es, self.rs)
    }
}

impl FromStr for FixedPositFormat {
    type Err = Error;

    /// Parses `N,es,rs` (whitespace and surrounding parentheses tolerated).
    fn from_str(s: &str) -> Result<Self> {
        let nums = parse_tuple(s)?;
        match nums.as_slice() {
            [n, es, rs] => validate(*n, *es, *rs),
            _ => Err(Error::Parse(format!("expected N,es,rs but got `{s}`"))),
        }
    }
}

impl Serialize for FixedPositFormat {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_triple().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FixedPositFormat {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [n, es, rs] = <[u32; 3]>::deserialize(deserializer)?;
        validate(n, es, rs).map_err(serde::de::Error::custom)
    }
}

/// A standard posit layout `(n, es)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositFormat {
    n: u32,
    es: u32,
}

impl PositFormat {
    pub fn new(n: u32, es: u32) -> Result<Self> {
        if !(3..=MAX_WIDTH).contains(&n) {
            return Err(Error::InvalidFormat(format!("posit width {n} outside 3..={MAX_WIDTH}")));
        }
        if es > n - 2 {
            return Err(Error::InvalidFormat(format!("posit es {es} exceeds n - 2 = {}", n - 2)));
        }
        if es >= 31 || i64::from(n - 1) << es > MAX_SCALE_SPAN {
            return Err(Error::InvalidFormat(format!("posit ({n}, {es}) scale range too wide")));
        }
        Ok(PositFormat { n, es })
    }

    pub const fn width(&self) -> u32 {
        self.n
    }

    pub const fn exponent_bits(&self) -> u32 {
        self.es
    }

    /// Largest scale, that of maxpos: `(n - 2) * 2^es`.
    pub fn max_scale(&self) -> i32 {
        ((self.n - 2) as i32) << self.es
    }

    /// Smallest scale, that of minpos.
    pub fn min_scale(&self) -> i32 {
        -self.max_scale()
    }
}

impl fmt::Display for PositFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n, self.es)
    }
}

impl FromStr for PositFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let nums = parse_tuple(s)?;
        match nums.as_slice() {
            [n, es] => PositFormat::new(*n, *es),
            _ => Err(Error::Parse(format!("expected N,es but got `{s}`"))),
        }
    }
}

/// Inclusive range of power-of-two scales a format can express.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleRange {
    pub min_scale: i32,
    pub max_scale: i32,
}

impl ScaleRange {
    pub fn contains(&self, scale: i32) -> bool {
        (self.min_scale..=self.max_scale).contains(&scale)
    }

    pub fn covers(&self, other: ScaleRange) -> bool {
        self.min_scale <= other.min_scale && other.max_scale <= self.max_scale
    }
}

/// Checks `(n, es, rs)` and returns the format if it leaves at least one
/// fraction bit.
pub fn validate(n: u32, es: u32, rs: u32) -> Result<FixedPositFormat> {
    if !(4..=MAX_WIDTH).contains(&n) {
        return Err(Error::InvalidFormat(format!("width {n} outside 4..={MAX_WIDTH}")));
    }
    if rs < 1 {
        return Err(Error::InvalidFormat("regime needs at least one bit".into()));
    }
    let used = 1 + u64::from(rs) + u64::from(es);
    if used > u64::from(n) - 1 {
        let frac = i64::from(n) - used as i64;
        return Err(Error::InvalidFormat(format!(
            "({n}, {es}, {rs}) leaves {frac} fraction bits, need at least 1"
        )));
    }
    if es >= 31 || i64::from(rs) << es > MAX_SCALE_SPAN {
        return Err(Error::InvalidFormat(format!("({n}, {es}, {rs}) scale range too wide")));
    }
    Ok(FixedPositFormat { n, es, rs })
}

/// `k` spans `[-rs, rs - 1]` and the exponent `[0, 2^es - 1]`, so the scale
/// `k * 2^es + e` spans `[-rs * 2^es, rs * 2^es - 1]`.
pub fn scale_range(fmt: FixedPositFormat) -> ScaleRange {
    let step = 1i32 << fmt.es;
    let rs = fmt.rs as i32;
    ScaleRange {
        min_scale: -rs * step,
        max_scale: rs * step - 1,
    }
}

/// All `(n, es, rs)` whose scale range is exactly `[-128, 127]`, i.e.
/// `rs * 2^es == 128`, with at least one fraction bit. Sorted by `es`.
pub fn enumerate_ieee_equivalent(n: u32) -> Vec<FixedPositFormat> {
    const TARGET_SPAN: u32 = 128;
    (0..=TARGET_SPAN.trailing_zeros())
        .filter_map(|es| validate(n, es, TARGET_SPAN >> es).ok())
        .collect()
}

/// Bit-widths the published enumeration covers.
pub const SWEEP_WIDTHS: [u32; 8] = [18, 20, 22, 24, 26, 28, 30, 32];

fn parse_tuple(s: &str) -> Result<Vec<u32>> {
    let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
    trimmed
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("bad number `{}` in `{s}`: {e}", part.trim())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_accepts_table_rows() {
        assert_eq!(validate(32, 6, 2).unwrap().fraction_bits(), 23);
        assert_eq!(validate(32, 3, 16).unwrap().fraction_bits(), 12);
        assert_eq!(validate(32, 4, 8).unwrap().fraction_bits(), 19);
        assert_eq!(validate(32, 5, 4).unwrap().fraction_bits(), 22);
        assert_eq!(validate(32, 7, 1).unwrap().fraction_bits(), 23);
    }

    #[test]
    fn validate_rejects_bad_layouts() {
        assert!(validate(18, 3, 16).is_err());
        assert!(validate(20, 3, 16).is_err());
        assert!(validate(8, 2, 0).is_err());
        assert!(validate(3, 0, 1).is_err());
        assert!(validate(65, 2, 2).is_err());
        // one fraction bit is the minimum
        assert_eq!(validate(5, 1, 2).unwrap().fraction_bits(), 1);
        assert!(validate(5, 2, 2).is_err());
    }

    #[test]
    fn scale_ranges() {
        let r = |n, es, rs| scale_range(validate(n, es, rs).unwrap());
        assert_eq!(r(32, 6, 2), ScaleRange { min_scale: -128, max_scale: 127 });
        assert_eq!(r(32, 3, 16), ScaleRange { min_scale: -128, max_scale: 127 });
        assert_eq!(r(16, 2, 2), ScaleRange { min_scale: -8, max_scale: 7 });
        assert_eq!(r(8, 0, 1), ScaleRange { min_scale: -1, max_scale: 0 });
    }

    #[test]
    fn enumerate_examples() {
        let triples = |n| {
            enumerate_ieee_equivalent(n)
                .iter()
                .map(|f| f.as_triple())
                .collect::<Vec<_>>()
        };
        assert_eq!(triples(32), vec![[32, 3, 16], [32, 4, 8], [32, 5, 4], [32, 6, 2], [32, 7, 1]]);
        assert_eq!(triples(18), vec![[18, 4, 8], [18, 5, 4], [18, 6, 2], [18, 7, 1]]);
        assert_eq!(triples(20), vec![[20, 4, 8], [20, 5, 4], [20, 6, 2], [20, 7, 1]]);
        assert!(triples(5).is_empty());
    }

    #[test]
    fn enumerated_ranges_cover_binary32() {
        let b32 = ScaleRange { min_scale: BINARY32_MIN_EXP, max_scale: BINARY32_MAX_EXP };
        for n in 4..=64 {
            for fmt in enumerate_ieee_equivalent(n) {
                assert!(fmt.scale_range().covers(b32), "{fmt}");
            }
        }
    }

    #[test]
    fn field_widths_sum_to_n() {
        for n in 4..=64 {
            for es in 0..n {
                for rs in 1..n {
                    if let Ok(f) = validate(n, es, rs) {
                        assert_eq!(f.fraction_bits() + es + rs + 1, n);
                    }
                }
            }
        }
    }

    #[test]
    fn parse_and_display() {
        let f: FixedPositFormat = "32,6,2".parse().unwrap();
        assert_eq!(f.as_triple(), [32, 6, 2]);
        let f: FixedPositFormat = "(18, 6, 2)".parse().unwrap();
        assert_eq!(f.to_string(), "(18, 6, 2)");
        assert!("32,6".parse::<FixedPositFormat>().is_err());
        assert!("32,x,2".parse::<FixedPositFormat>().is_err());
        let p: PositFormat = "32,6".parse().unwrap();
        assert_eq!(p.max_scale(), 30 * 64);
        assert_eq!(serde_json::to_string(&validate(32, 6, 2).unwrap()).unwrap(), "[32,6,2]");
    }

    #[test]
    fn posit_format_limits() {
        assert!(PositFormat::new(8, 2).is_ok());
        assert!(PositFormat::new(8, 7).is_err());
        assert!(PositFormat::new(2, 0).is_err());
        let p = PositFormat::new(8, 2).unwrap();
        assert_eq!((p.min_scale(), p.max_scale()), (-24, 24));
    }
}

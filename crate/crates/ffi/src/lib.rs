//! C interface to the fixposit codec and multiplier.
//!
//! Formats are opaque handles created with [`fixposit_format_new`] and
//! released with [`fixposit_format_free`]. Words travel as right-aligned
//! `uint64_t`. Every fallible call returns a [`FixpositStatus`] and writes its
//! result through an out-pointer only on success.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fixposit::codec::{decoded_to_binary64, from_binary32, RoundingMode};
use fixposit::format::{enumerate_ieee_equivalent, validate};
use fixposit::multiplier::{mul_binary32_via, mul_datapath};
use fixposit::{Decoded, Error, FixedPositFormat, PositWord};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixpositStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidFormat = 2,
    WordOutOfRange = 3,
    NotExact = 4,
    BufferTooSmall = 5,
    InvalidArgument = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixpositRounding {
    NearestEven = 0,
    TowardZero = 1,
}

impl From<FixpositRounding> for RoundingMode {
    fn from(r: FixpositRounding) -> Self {
        match r {
            FixpositRounding::NearestEven => RoundingMode::NearestEven,
            FixpositRounding::TowardZero => RoundingMode::TowardZero,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixpositKind {
    Zero = 0,
    NaR = 1,
    Normal = 2,
}

/// A decoded word: `(-1)^negative * 2^scale * significand / 2^frac_bits`
/// when `kind` is normal; the numeric fields are zero otherwise.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FixpositDecoded {
    pub kind: FixpositKind,
    pub negative: bool,
    pub scale: i32,
    pub significand: u64,
    pub frac_bits: u32,
}

/// Opaque format handle.
pub struct FixpositFormat {
    inner: FixedPositFormat,
}

fn status_of(e: &Error) -> FixpositStatus {
    match e {
        Error::InvalidFormat(_) | Error::FormatMismatch(..) => FixpositStatus::InvalidFormat,
        Error::WordTooWide { .. } => FixpositStatus::WordOutOfRange,
        Error::NotExact => FixpositStatus::NotExact,
        _ => FixpositStatus::InvalidArgument,
    }
}

fn guarded(body: impl FnOnce() -> Result<(), FixpositStatus>) -> FixpositStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => FixpositStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => FixpositStatus::Panic,
    }
}

/// # Safety
/// `fmt` must be null or a handle from [`fixposit_format_new`].
unsafe fn format_ref<'a>(fmt: *const FixpositFormat) -> Result<&'a FixedPositFormat, FixpositStatus> {
    fmt.as_ref().map(|f| &f.inner).ok_or(FixpositStatus::NullPointer)
}

/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), FixpositStatus> {
    if out.is_null() {
        return Err(FixpositStatus::NullPointer);
    }
    out.write(value);
    Ok(())
}

fn word(fmt: FixedPositFormat, bits: u64) -> Result<PositWord, FixpositStatus> {
    PositWord::new(bits, fmt).map_err(|e| status_of(&e))
}

/// Creates a `(n, es, rs)` format handle in `*out`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn fixposit_format_new(n: u32, es: u32, rs: u32, out: *mut *mut FixpositFormat) -> FixpositStatus {
    guarded(|| {
        if out.is_null() {
            return Err(FixpositStatus::NullPointer);
        }
        let inner = validate(n, es, rs).map_err(|e| status_of(&e))?;
        write_out(out, Box::into_raw(Box::new(FixpositFormat { inner })))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `fmt` must be null or a handle from [`fixposit_format_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fixposit_format_free(fmt: *mut FixpositFormat) {
    if !fmt.is_null() {
        drop(Box::from_raw(fmt));
    }
}

/// Fraction bits of the format, or 0 for a null handle.
///
/// # Safety
/// `fmt` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fixposit_format_fraction_bits(fmt: *const FixpositFormat) -> u32 {
    format_ref(fmt).map(|f| f.fraction_bits()).unwrap_or(0)
}

/// # Safety
/// `fmt` must be a live handle; `min_scale` and `max_scale` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fixposit_format_scale_range(
    fmt: *const FixpositFormat,
    min_scale: *mut i32,
    max_scale: *mut i32,
) -> FixpositStatus {
    guarded(|| {
        let f = format_ref(fmt)?;
        if min_scale.is_null() || max_scale.is_null() {
            return Err(FixpositStatus::NullPointer);
        }
        let r = f.scale_range();
        write_out(min_scale, r.min_scale)?;
        write_out(max_scale, r.max_scale)
    })
}

/// # Safety
/// `fmt` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fixposit_from_binary32(
    fmt: *const FixpositFormat,
    value: f32,
    rounding: FixpositRounding,
    out: *mut u64,
) -> FixpositStatus {
    guarded(|| {
        let f = *format_ref(fmt)?;
        write_out(out, from_binary32(value.to_bits(), f, rounding.into()).bits())
    })
}

/// Correctly rounded binary32 value of a word. NaR gives a quiet NaN.
///
/// # Safety
/// `fmt` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fixposit_to_binary32(
    fmt: *const FixpositFormat,
    bits: u64,
    rounding: FixpositRounding,
    out: *mut f32,
) -> FixpositStatus {
    guarded(|| {
        let w = word(*format_ref(fmt)?, bits)?;
        write_out(out, f32::from_bits(w.to_binary32(rounding.into())))
    })
}

/// Exact binary64 value of a word; `NotExact` when it does not fit.
///
/// # Safety
/// `fmt` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fixposit_to_binary64(fmt: *const FixpositFormat, bits: u64, out: *mut f64) -> FixpositStatus {
    guarded(|| {
        let w = word(*format_ref(fmt)?, bits)?;
        let v = decoded_to_binary64(&w.decode()).map_err(|e| status_of(&e))?;
        write_out(out, v)
    })
}

/// # Safety
/// `fmt` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fixposit_decode(fmt: *const FixpositFormat, bits: u64, out: *mut FixpositDecoded) -> FixpositStatus {
    guarded(|| {
        let w = word(*format_ref(fmt)?, bits)?;
        let empty = FixpositDecoded { kind: FixpositKind::Zero, negative: false, scale: 0, significand: 0, frac_bits: 0 };
        let d = match w.decode() {
            Decoded::Zero => empty,
            Decoded::NaR => FixpositDecoded { kind: FixpositKind::NaR, ..empty },
            Decoded::Normal(n) => FixpositDecoded {
                kind: FixpositKind::Normal,
                negative: n.negative,
                scale: n.scale,
                significand: n.significand,
                frac_bits: n.frac_bits,
            },
        };
        write_out(out, d)
    })
}

/// Word product through the datapath model, rounding to nearest even.
///
/// # Safety
/// `fmt` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fixposit_mul(fmt: *const FixpositFormat, a: u64, b: u64, out: *mut u64) -> FixpositStatus {
    guarded(|| {
        let f = *format_ref(fmt)?;
        let c = mul_datapath(&word(f, a)?, &word(f, b)?).map_err(|e| status_of(&e))?;
        write_out(out, c.bits())
    })
}

/// binary32 product with both operands and the result passed through the
/// format.
///
/// # Safety
/// `fmt` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fixposit_mul_binary32(
    fmt: *const FixpositFormat,
    a: f32,
    b: f32,
    rounding: FixpositRounding,
    out: *mut f32,
) -> FixpositStatus {
    guarded(|| {
        let f = *format_ref(fmt)?;
        write_out(out, mul_binary32_via(f, rounding.into(), a, b))
    })
}

/// Lists the `(n, es, rs)` formats of width `width` covering the binary32
/// exponent range as consecutive triples in `triples`. `*count` receives the
/// number of formats; `BufferTooSmall` is returned when `capacity` (in
/// formats) is short, with nothing written to `triples`.
///
/// # Safety
/// `triples` must be valid for `3 * capacity` writes (or null when
/// `capacity` is 0); `count` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn fixposit_enumerate(width: u32, triples: *mut u32, capacity: usize, count: *mut usize) -> FixpositStatus {
    guarded(|| {
        if count.is_null() {
            return Err(FixpositStatus::NullPointer);
        }
        let list = enumerate_ieee_equivalent(width);
        count.write(list.len());
        if list.len() > capacity {
            return Err(FixpositStatus::BufferTooSmall);
        }
        if list.is_empty() {
            return Ok(());
        }
        if triples.is_null() {
            return Err(FixpositStatus::NullPointer);
        }
        let out = std::slice::from_raw_parts_mut(triples, 3 * list.len());
        for (slot, f) in out.chunks_exact_mut(3).zip(&list) {
            slot.copy_from_slice(&f.as_triple());
        }
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn fixposit_status_message(status: FixpositStatus) -> *const c_char {
    let msg: &'static CStr = match status {
        FixpositStatus::Ok => c"ok",
        FixpositStatus::NullPointer => c"null pointer argument",
        FixpositStatus::InvalidFormat => c"invalid format",
        FixpositStatus::WordOutOfRange => c"word wider than the format",
        FixpositStatus::NotExact => c"value not exactly representable",
        FixpositStatus::BufferTooSmall => c"output buffer too small",
        FixpositStatus::InvalidArgument => c"invalid argument",
        FixpositStatus::Panic => c"internal error",
    };
    msg.as_ptr()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fixposit_version() -> *const c_char {
    const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

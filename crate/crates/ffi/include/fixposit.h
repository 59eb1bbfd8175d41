/* Generated by cbindgen; do not edit. */

#ifndef FIXPOSIT_H
#define FIXPOSIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum FixpositStatus {
  FixpositStatus_Ok = 0,
  FixpositStatus_NullPointer = 1,
  FixpositStatus_InvalidFormat = 2,
  FixpositStatus_WordOutOfRange = 3,
  FixpositStatus_NotExact = 4,
  FixpositStatus_BufferTooSmall = 5,
  FixpositStatus_InvalidArgument = 6,
  FixpositStatus_Panic = 7,
} FixpositStatus;

typedef enum FixpositRounding {
  FixpositRounding_NearestEven = 0,
  FixpositRounding_TowardZero = 1,
} FixpositRounding;

typedef enum FixpositKind {
  FixpositKind_Zero = 0,
  FixpositKind_NaR = 1,
  FixpositKind_Normal = 2,
} FixpositKind;

/**
 * Opaque format handle.
 */
typedef struct FixpositFormat FixpositFormat;

/**
 * A decoded word: `(-1)^negative * 2^scale * significand / 2^frac_bits`
 * when `kind` is normal; the numeric fields are zero otherwise.
 */
typedef struct FixpositDecoded {
  enum FixpositKind kind;
  bool negative;
  int32_t scale;
  uint64_t significand;
  uint32_t frac_bits;
} FixpositDecoded;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a `(n, es, rs)` format handle in `*out`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum FixpositStatus fixposit_format_new(uint32_t n,
                                        uint32_t es,
                                        uint32_t rs,
                                        struct FixpositFormat **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `fmt` must be null or a handle from [`fixposit_format_new`] not yet freed.
 */
void fixposit_format_free(struct FixpositFormat *fmt);

/**
 * Fraction bits of the format, or 0 for a null handle.
 *
 * # Safety
 * `fmt` must be null or a live handle.
 */
uint32_t fixposit_format_fraction_bits(const struct FixpositFormat *fmt);

/**
 * # Safety
 * `fmt` must be a live handle; `min_scale` and `max_scale` valid for writes.
 */
enum FixpositStatus fixposit_format_scale_range(const struct FixpositFormat *fmt,
                                                int32_t *min_scale,
                                                int32_t *max_scale);

/**
 * # Safety
 * `fmt` must be a live handle; `out` valid for a write.
 */
enum FixpositStatus fixposit_from_binary32(const struct FixpositFormat *fmt,
                                           float value,
                                           enum FixpositRounding rounding,
                                           uint64_t *out);

/**
 * Correctly rounded binary32 value of a word. NaR gives a quiet NaN.
 *
 * # Safety
 * `fmt` must be a live handle; `out` valid for a write.
 */
enum FixpositStatus fixposit_to_binary32(const struct FixpositFormat *fmt,
                                         uint64_t bits,
                                         enum FixpositRounding rounding,
                                         float *out);

/**
 * Exact binary64 value of a word; `NotExact` when it does not fit.
 *
 * # Safety
 * `fmt` must be a live handle; `out` valid for a write.
 */
enum FixpositStatus fixposit_to_binary64(const struct FixpositFormat *fmt,
                                         uint64_t bits,
                                         double *out);

/**
 * # Safety
 * `fmt` must be a live handle; `out` valid for a write.
 */
enum FixpositStatus fixposit_decode(const struct FixpositFormat *fmt,
                                    uint64_t bits,
                                    struct FixpositDecoded *out);

/**
 * Word product through the datapath model, rounding to nearest even.
 *
 * # Safety
 * `fmt` must be a live handle; `out` valid for a write.
 */
enum FixpositStatus fixposit_mul(const struct FixpositFormat *fmt,
                                 uint64_t a,
                                 uint64_t b,
                                 uint64_t *out);

/**
 * binary32 product with both operands and the result passed through the
 * format.
 *
 * # Safety
 * `fmt` must be a live handle; `out` valid for a write.
 */
enum FixpositStatus fixposit_mul_binary32(const struct FixpositFormat *fmt,
                                          float a,
                                          float b,
                                          enum FixpositRounding rounding,
                                          float *out);

/**
 * Lists the `(n, es, rs)` formats of width `width` covering the binary32
 * exponent range as consecutive triples in `triples`. `*count` receives the
 * number of formats; `BufferTooSmall` is returned when `capacity` (in
 * formats) is short, with nothing written to `triples`.
 *
 * # Safety
 * `triples` must be valid for `3 * capacity` writes (or null when
 * `capacity` is 0); `count` valid for a write.
 */
enum FixpositStatus fixposit_enumerate(uint32_t width,
                                       uint32_t *triples,
                                       size_t capacity,
                                       size_t *count);

/**
 * Static description of a status code.
 */
const char *fixposit_status_message(enum FixpositStatus status);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fixposit_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FIXPOSIT_H */

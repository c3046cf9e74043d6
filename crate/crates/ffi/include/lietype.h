#ifndef LIETYPE_H
#define LIETYPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status codes returned by every fallible function.
typedef enum LtStatus {
  LT_STATUS_OK = 0,
  LT_STATUS_NULL_POINTER = 1,
  LT_STATUS_INVALID_UTF8 = 2,
  LT_STATUS_INPUT_ERROR = 3,
  LT_STATUS_COMPUTATION_ERROR = 4,
  LT_STATUS_CAP_EXCEEDED = 5,
  LT_STATUS_BUFFER_TOO_SMALL = 6,
  LT_STATUS_PANIC = 7,
} LtStatus;

// Outcome of [`lt_verdict`].
typedef enum LtVerdict {
  LT_VERDICT_GUARANTEED_THM_EXAMPLES = 0,
  LT_VERDICT_GUARANTEED_THM_EXAMPLES2 = 1,
  LT_VERDICT_UNKNOWN = 2,
} LtVerdict;

// Opaque root datum handle.
typedef struct LtDatum LtDatum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last error on this thread, or null. Valid until the next
// call into this library on the same thread.
const char *lt_last_error_message(void);

// Stable code of the last error on this thread (for example `CAP_EXCEEDED`), or null.
const char *lt_last_error_code(void);

// Library version as a static string.
const char *lt_version(void);

// Build a datum from a label such as `A2`, `B3ad`, `T1xD4` or `GL3`.
//
// # Safety
// `label` is a NUL-terminated string; `out` is valid for writes.
enum LtStatus lt_datum_from_label(const char *label, struct LtDatum **out);

// Parse a datum file (JSON text).
//
// # Safety
// `text` is a NUL-terminated string; `out` is valid for writes.
enum LtStatus lt_datum_from_json(const char *text, struct LtDatum **out);

// Free a datum handle. Null is ignored.
//
// # Safety
// `d` is null or a handle from this library not yet freed.
void lt_datum_free(struct LtDatum *d);

// Free a string returned by this library. Null is ignored.
//
// # Safety
// `s` is null or a string from this library not yet freed.
void lt_string_free(char *s);

// # Safety
// `d` is a live handle; `out` is valid for writes.
enum LtStatus lt_datum_rank(const struct LtDatum *d, size_t *out);

// The datum in datum-file JSON form.
//
// # Safety
// `d` is a live handle; `out` is valid for writes.
enum LtStatus lt_datum_to_json(const struct LtDatum *d, char **out);

// Fundamental degrees in ascending order. `len` receives the number of
// degrees; if `capacity` is smaller, nothing is written to `buf` and
// `LT_STATUS_BUFFER_TOO_SMALL` is returned.
//
// # Safety
// `d` is a live handle; `buf` is valid for `capacity` writes (or null when
// `capacity` is 0); `len` is valid for writes.
enum LtStatus lt_degrees(const struct LtDatum *d, uint32_t *buf, size_t capacity, size_t *len);

// Order of the Weyl group (product of the degrees).
//
// # Safety
// `d` is a live handle; `out` is valid for writes.
enum LtStatus lt_weyl_order(const struct LtDatum *d, uint64_t *out);

// Fixed-point datum of the twisting `tau` (see the CLI's `--tau` syntax)
// at the prime `ell`. `precision` 0 selects the default.
//
// # Safety
// `d` is a live handle; `tau` is a NUL-terminated string; `out` is valid for writes.
enum LtStatus lt_fixed_datum(const struct LtDatum *d,
                             const char *tau,
                             uint64_t ell,
                             uint32_t precision_k,
                             struct LtDatum **out);

// Untwisting result as JSON, including the classification key when the
// valuation is finite.
//
// # Safety
// `d` is a live handle; `tau` and `q` are NUL-terminated strings; `out` is valid for writes.
enum LtStatus lt_untwist_json(const struct LtDatum *d,
                              const char *tau,
                              const char *q,
                              uint64_t ell,
                              uint32_t precision_k,
                              char **out);

// Tezuka report as JSON, with series truncated at degree `trunc`.
//
// # Safety
// `d` is a live handle; `tau` and `q` are NUL-terminated strings; `out` is valid for writes.
enum LtStatus lt_tezuka_json(const struct LtDatum *d,
                             const char *tau,
                             const char *q,
                             uint64_t ell,
                             uint32_t precision_k,
                             size_t trunc,
                             char **out);

// Fundamental-class verdict for a labeled datum.
//
// # Safety
// `d` is a live handle; `tau` is a NUL-terminated string; `out` is valid for writes.
enum LtStatus lt_verdict(const struct LtDatum *d,
                         const char *tau,
                         uint64_t ell,
                         uint32_t precision_k,
                         enum LtVerdict *out);

// `q = zeta * q'` modulo `ell^precision`: the order `e` of `q` mod `ell`,
// the Teichmüller lift `zeta` and `q'`, as residues in `[0, ell^k)`.
//
// # Safety
// The out-pointers are valid for writes.
enum LtStatus lt_padic_untwist(int64_t q,
                               uint64_t ell,
                               uint32_t precision_k,
                               uint64_t *e,
                               uint64_t *zeta,
                               uint64_t *q_prime);

// Multiplicative order of `q` modulo `ell`.
//
// # Safety
// `out` is valid for writes.
enum LtStatus lt_mult_order(int64_t q, uint64_t ell, uint32_t precision_k, uint64_t *out);

// `v_ell(u - 1)`, or -1 when `u = 1` at the working precision.
//
// # Safety
// `out` is valid for writes.
enum LtStatus lt_unit_valuation(int64_t u, uint64_t ell, uint32_t precision_k, int32_t *out);

// Whether the Koszul Tor totals match `prod (1 + t^{2d-1})/(1 - t^{2d})`
// through degree `trunc` over `F_ell`.
//
// # Safety
// `degrees` is valid for `count` reads (or null when `count` is 0); `passed` is valid for writes.
enum LtStatus lt_em_collapse_check(const uint32_t *degrees,
                                   size_t count,
                                   size_t trunc,
                                   uint64_t ell,
                                   bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LIETYPE_H */

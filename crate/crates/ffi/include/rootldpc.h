#ifndef ROOTLDPC_H
#define ROOTLDPC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Density-evolution recursion selector.
typedef enum RldpcEnsemble {
  RLDPC_ENSEMBLE_RANDOM = 0,
  RLDPC_ENSEMBLE_ROOT = 1,
} RldpcEnsemble;

// Result code of every call.
typedef enum RldpcStatus {
  RLDPC_STATUS_OK = 0,
  RLDPC_STATUS_NULL_POINTER = 1,
  RLDPC_STATUS_INVALID_ARGUMENT = 2,
  RLDPC_STATUS_DIMENSION = 3,
  RLDPC_STATUS_BUDGET_EXCEEDED = 4,
  RLDPC_STATUS_INFEASIBLE = 5,
  RLDPC_STATUS_DEGREE_DISTRIBUTION = 6,
  RLDPC_STATUS_NUMERICAL = 7,
  RLDPC_STATUS_PARSE = 8,
  RLDPC_STATUS_IO = 9,
  RLDPC_STATUS_PANIC = 10,
} RldpcStatus;

// Decoding algorithm selector.
typedef enum RldpcVariant {
  RLDPC_VARIANT_BP = 0,
  RLDPC_VARIANT_MIN_SUM = 1,
} RldpcVariant;

// A parity-check matrix together with its information positions.
typedef struct RldpcCode RldpcCode;

// An iterative decoder bound to a copy of a code.
typedef struct RldpcDecoder RldpcDecoder;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len` bytes). Returns the full message length without the
// terminator.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t rldpc_last_error(char *buf, size_t len);

// Regular (3,6) root-LDPC code of length `n` (a multiple of 4).
//
// # Safety
// `out` must point to writable storage for one pointer.
enum RldpcStatus rldpc_code_root_regular(size_t n, uint64_t seed, struct RldpcCode **out);

// Full-diversity code with minimum blockwise weight 2 (even `n` ≥ 4).
//
// # Safety
// `out` must point to writable storage for one pointer.
enum RldpcStatus rldpc_code_wstar2(size_t n, struct RldpcCode **out);

// Code read from an alist file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must point to writable
// storage for one pointer.
enum RldpcStatus rldpc_code_read_alist(const char *path, struct RldpcCode **out);

// Write the parity-check matrix in alist format.
//
// # Safety
// `code` must be a live handle and `path` a NUL-terminated string.
enum RldpcStatus rldpc_code_write_alist(const struct RldpcCode *code, const char *path);

// Length, number of checks and GF(2) rank of the parity-check matrix.
// Any output pointer may be null.
//
// # Safety
// `code` must be a live handle; non-null outputs must be writable.
enum RldpcStatus rldpc_code_dimensions(const struct RldpcCode *code,
                                       size_t *n,
                                       size_t *checks,
                                       size_t *rank);

// Block diversity and minimum blockwise weight over `nc` equal blocks, by
// exhaustive enumeration. `wstar` is set to -1 when the code has no
// nonzero codeword.
//
// # Safety
// `code` must be a live handle; `diversity` and `wstar` must be writable.
enum RldpcStatus rldpc_code_diversity(const struct RldpcCode *code,
                                      size_t nc,
                                      size_t *diversity,
                                      int64_t *wstar);

// Release a code handle. Null is ignored.
//
// # Safety
// `code` must be null or a handle not yet freed.
void rldpc_code_free(struct RldpcCode *code);

// Decoder for `code` with at most `max_iter` iterations. The decoder keeps
// its own copy of the code.
//
// # Safety
// `code` must be a live handle; `out` must point to writable storage for
// one pointer.
enum RldpcStatus rldpc_decoder_new(const struct RldpcCode *code,
                                   enum RldpcVariant variant,
                                   size_t max_iter,
                                   struct RldpcDecoder **out);

// Decode `n` channel LLRs (positive favours bit 0) into `bits`.
// `converged` and `iterations` may be null.
//
// # Safety
// `decoder` must be a live handle, `llr` must hold `n` readable values and
// `bits` `n` writable bytes.
enum RldpcStatus rldpc_decoder_decode(struct RldpcDecoder *decoder,
                                      const double *llr,
                                      size_t n,
                                      uint8_t *bits,
                                      bool *converged,
                                      size_t *iterations);

// Release a decoder handle. Null is ignored.
//
// # Safety
// `decoder` must be null or a handle not yet freed.
void rldpc_decoder_free(struct RldpcDecoder *decoder);

// AWGN density-evolution threshold (Eb/N0 in dB) of the regular (dv, dc)
// ensemble, bisected to `tol_db`.
//
// # Safety
// `threshold_db` must be writable.
enum RldpcStatus rldpc_awgn_threshold(enum RldpcEnsemble ensemble,
                                      size_t dv,
                                      size_t dc,
                                      double tol_db,
                                      double *threshold_db);

// Monte Carlo outage probability of `nc` Rayleigh blocks at `ebn0_db`.
//
// # Safety
// `p_out` must be writable.
enum RldpcStatus rldpc_outage_probability(double ebn0_db,
                                          double rate,
                                          size_t nc,
                                          uint64_t samples,
                                          uint64_t seed,
                                          double *p_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROOTLDPC_H */

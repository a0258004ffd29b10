/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef WEYLBENCH_H
#define WEYLBENCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  WB_STATUS_OK = 0,
  WB_STATUS_NULL_POINTER = 1,
  WB_STATUS_INVALID_INPUT = 2,
  WB_STATUS_DIMENSION = 3,
  WB_STATUS_INVARIANT = 4,
  WB_STATUS_PARSE = 5,
  WB_STATUS_NOT_APPLICABLE = 6,
  WB_STATUS_IO = 7,
  WB_STATUS_BUFFER_TOO_SMALL = 8,
  WB_STATUS_PANIC = 9,
} WbStatus;

/**
 * Opaque operator on two-forms.
 */
typedef struct WbOperator WbOperator;

/**
 * Constants of the rigidity theorems; unavailable entries are NaN.
 */
typedef struct {
  size_t n;
  double s_n;
  double alpha;
  double a1;
  double a2;
} WbConstants;

typedef struct {
  double condition_value;
  double threshold;
  bool satisfied;
  bool strict;
} WbVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *wb_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t wb_last_error_message(char *buf, size_t len);

/**
 * Parses an operator from the dense or sparse JSON exchange format.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
WbStatus wb_operator_from_json(const char *json, WbOperator **out);

/**
 * Curvature tensor of a model space, e.g. `"product:sphere:2:1,sphere:2:1"`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
WbStatus wb_operator_from_model(const char *spec, WbOperator **out);

/**
 * # Safety
 * `op` must be null or a handle from this library that was not yet freed.
 */
void wb_operator_free(WbOperator *op);

/**
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
WbStatus wb_operator_dim(const WbOperator *op, size_t *out);

/**
 * Dense JSON of `op` into `buf`. `written` receives the length without the
 * NUL; `WB_STATUS_BUFFER_TOO_SMALL` is returned when `len` is not enough.
 *
 * # Safety
 * `op` must be a live handle, `buf` valid for `len` bytes, `written` writable.
 */
WbStatus wb_operator_to_json(const WbOperator *op, char *buf, size_t len, size_t *written);

/**
 * `⟨a, b⟩`, a quarter of the full contraction.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` must be writable.
 */
WbStatus wb_inner(const WbOperator *a, const WbOperator *b, double *out);

/**
 * Largest component of the first Bianchi map.
 *
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
WbStatus wb_bianchi_residual(const WbOperator *op, double *out);

/**
 * Weyl part of a curvature tensor (`n ≥ 4`) as a new handle.
 *
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
WbStatus wb_weyl_part(const WbOperator *op, WbOperator **out);

/**
 * Scalar curvature `tr Rc` of a curvature tensor.
 *
 * # Safety
 * `op` must be a live handle; `out` must be writable.
 */
WbStatus wb_scalar_curvature(const WbOperator *op, double *out);

/**
 * `⟨T, T♯⟩` and `⟨T, T²⟩` of a curvature tensor.
 *
 * # Safety
 * `op` must be a live handle; the outputs must be writable.
 */
WbStatus wb_cubic_invariants(const WbOperator *op, double *sharp_cubic, double *square_cubic);

/**
 * # Safety
 * `out` must be writable.
 */
WbStatus wb_constants(size_t n, WbConstants *out);

/**
 * Integral gap verdict for `n ≥ 5`.
 *
 * # Safety
 * `out` must be writable.
 */
WbStatus wb_gap_verdict(double norm_w, double norm_e, double lambda, size_t n, WbVerdict *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEYLBENCH_H */

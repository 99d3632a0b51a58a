#ifndef CURVEFLOW_H
#define CURVEFLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CF_CURVE_ELLIPSE 0

#define CF_CURVE_FOUR_LEAF_ROSE 1

#define CF_CURVE_FLOWER 2

#define CF_CURVE_RECTANGLE 3

#define CF_SCHEME_FDM 0

#define CF_SCHEME_FEM 1

#define CF_SCHEME_FEM_TM 2

// `f(L) = 2 pi / L`; the force parameter is ignored.
#define CF_FORCE_AREA_PRESERVING 0

// `f(L) = 2 pi ind / L`; the force parameter is `ind`.
#define CF_FORCE_AREA_PRESERVING_INDEX 1

// `f(L) = (2 pi - beta) / L`; the force parameter is `beta`.
#define CF_FORCE_PRESCRIBED_RATE 2

typedef enum CfStatus {
  CF_STATUS_OK = 0,
  CF_STATUS_NULL_POINTER = 1,
  CF_STATUS_INVALID_ARGUMENT = 2,
  CF_STATUS_INVALID_CURVE = 3,
  CF_STATUS_BUFFER_TOO_SMALL = 4,
  CF_STATUS_CUSP = 5,
  CF_STATUS_SINGULAR_SYSTEM = 6,
  CF_STATUS_MESH_DEGENERATE = 7,
  CF_STATUS_NUMERICAL_DEGENERACY = 8,
  CF_STATUS_PANIC = 9,
} CfStatus;

// Opaque closed polygon.
typedef struct CfCurve CfCurve;

// Opaque stepping state: scheme, forcing and time step.
typedef struct CfEvolver CfEvolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *cf_last_error_message(void);

// Samples one of the built-in initial curves at `n` uniform parameter values.
//
// # Safety
// `out` must be valid for writing a pointer.
enum CfStatus cf_curve_sample(uint32_t kind, size_t n, struct CfCurve **out);

// Builds a curve from `n` interleaved `x, y` pairs.
//
// # Safety
// `xy` must point to `2 * n` readable doubles and `out` must be writable.
enum CfStatus cf_curve_from_xy(const double *xy, size_t n, struct CfCurve **out);

// Releases a curve. Null is ignored.
//
// # Safety
// `curve` must come from this library and not be used afterwards.
void cf_curve_free(struct CfCurve *curve);

// Number of vertices, or 0 for null.
//
// # Safety
// `curve` must be null or a live handle.
size_t cf_curve_len(const struct CfCurve *curve);

// Copies the vertices as interleaved `x, y` pairs into `xy`, which holds
// `capacity` doubles.
//
// # Safety
// `curve` must be a live handle and `xy` writable for `capacity` doubles.
enum CfStatus cf_curve_vertices(const struct CfCurve *curve, double *xy, size_t capacity);

// # Safety
// `curve` must be a live handle and `out` writable.
enum CfStatus cf_curve_perimeter(const struct CfCurve *curve, double *out);

// Signed enclosed area, positive for counterclockwise curves.
//
// # Safety
// `curve` must be a live handle and `out` writable.
enum CfStatus cf_curve_area(const struct CfCurve *curve, double *out);

// Longest over shortest edge.
//
// # Safety
// `curve` must be a live handle and `out` writable.
enum CfStatus cf_curve_mesh_ratio(const struct CfCurve *curve, double *out);

// Area between two curves weighted by the difference of winding numbers.
//
// # Safety
// Both curves must be live handles and `out` writable.
enum CfStatus cf_manifold_distance(const struct CfCurve *a, const struct CfCurve *b, double *out);

// Creates an evolver. `alpha` is read only for `CF_SCHEME_FEM_TM`, where a
// value of 0 or below selects 1. `edge_normals` nonzero switches FEM-TM to
// incoming-edge vertex normals.
//
// # Safety
// `out` must be writable.
enum CfStatus cf_evolver_new(uint32_t scheme,
                             double alpha,
                             int32_t edge_normals,
                             uint32_t force,
                             double force_param,
                             double tau,
                             struct CfEvolver **out);

// Releases an evolver. Null is ignored.
//
// # Safety
// `evolver` must come from this library and not be used afterwards.
void cf_evolver_free(struct CfEvolver *evolver);

// Advances `curve` in place by `steps` time steps. On failure the curve
// holds the last successfully computed level.
//
// # Safety
// Both handles must be live and distinct from any concurrently used handle.
enum CfStatus cf_evolver_step(const struct CfEvolver *evolver, struct CfCurve *curve, size_t steps);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CURVEFLOW_H */

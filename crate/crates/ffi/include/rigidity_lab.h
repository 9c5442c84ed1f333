/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef RIGIDITY_LAB_H
#define RIGIDITY_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RlScheme {
  RL_SCHEME_CENTRAL = 0,
  RL_SCHEME_FORWARD = 1,
} RlScheme;

/**
 * Result codes.
 */
typedef enum RlStatus {
  RL_STATUS_OK = 0,
  RL_STATUS_NULL_POINTER = 1,
  RL_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed JSON, OBJ or parameter string.
   */
  RL_STATUS_PARSE = 3,
  /**
   * The polyhedron or triangulation fails validation.
   */
  RL_STATUS_INVALID_INPUT = 4,
  /**
   * Parameters outside their domain.
   */
  RL_STATUS_BAD_PARAMS = 5,
  /**
   * A numerical step could not complete (degenerate tetrahedra and so on).
   */
  RL_STATUS_NUMERICAL = 6,
  RL_STATUS_IO = 7,
  /**
   * A panic was caught at the boundary.
   */
  RL_STATUS_INTERNAL = 8,
} RlStatus;

/**
 * Opaque polyhedron handle.
 */
typedef struct RlPolyhedron RlPolyhedron;

typedef struct RlAnalysisOptions {
  enum RlScheme scheme;
  /**
   * Finite-difference step; zero or negative picks the scheme default.
   */
  double epsilon;
  double tol_eig;
  double tol_sv;
  size_t budget;
} RlAnalysisOptions;

typedef struct RlGenParams {
  double theta;
  double r;
  double h;
  double depth;
  double shift;
  /**
   * Use the alternate diagonal when closing the T-polyhedron cover.
   */
  bool backward_cover;
} RlGenParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library from this thread.
 */
const char *rl_last_error(void);

struct RlAnalysisOptions rl_analysis_options_default(void);

struct RlGenParams rl_gen_params_default(void);

/**
 * Parses a polyhedron document.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum RlStatus rl_polyhedron_from_json(const char *json, struct RlPolyhedron **out);

/**
 * Builds a named polyhedron. `params` may be null for defaults.
 *
 * # Safety
 * `name` must be a nul-terminated string, `params` null or valid, `out`
 * writable.
 */
enum RlStatus rl_polyhedron_generate(const char *name,
                                     const struct RlGenParams *params,
                                     struct RlPolyhedron **out);

/**
 * # Safety
 * `p` must be null or a handle from this library not yet freed.
 */
void rl_polyhedron_free(struct RlPolyhedron *p);

/**
 * # Safety
 * `p` must be a live handle.
 */
size_t rl_polyhedron_vertex_count(const struct RlPolyhedron *p);

/**
 * # Safety
 * `p` must be a live handle.
 */
size_t rl_polyhedron_face_count(const struct RlPolyhedron *p);

/**
 * Copies vertex coordinates as `x0 y0 z0 x1 ...` into `buf`, which must hold
 * `3 * rl_polyhedron_vertex_count(p)` doubles.
 *
 * # Safety
 * `p` must be a live handle and `buf` valid for `len` writes.
 */
enum RlStatus rl_polyhedron_vertices(const struct RlPolyhedron *p, double *buf, size_t len);

/**
 * Serializes the document.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum RlStatus rl_polyhedron_to_json(const struct RlPolyhedron *p, char **out);

/**
 * Writes the surface as Wavefront OBJ text.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum RlStatus rl_polyhedron_to_obj(const struct RlPolyhedron *p, char **out);

/**
 * Full analysis, returned as an analysis report in JSON. `opts` may be null.
 *
 * # Safety
 * `p` must be a live handle, `opts` null or valid, `out` writable.
 */
enum RlStatus rl_analyze(const struct RlPolyhedron *p,
                         const struct RlAnalysisOptions *opts,
                         char **out);

/**
 * Decomposition search only, as JSON.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum RlStatus rl_decompose(const struct RlPolyhedron *p, size_t budget, char **out);

/**
 * Sweeps `param` (`theta`, `shift` or `depth`) of a generator over
 * `from..=to` and returns the table as JSON.
 *
 * # Safety
 * String arguments must be nul-terminated, `params` and `opts` null or
 * valid, `out` writable.
 */
enum RlStatus rl_sweep(const char *generator,
                       const char *param,
                       double from,
                       double to,
                       double step,
                       const struct RlGenParams *params,
                       const struct RlAnalysisOptions *opts,
                       char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void rl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RIGIDITY_LAB_H */

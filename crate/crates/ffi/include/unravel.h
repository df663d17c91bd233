/* C interface to the unravel library. Generated by cbindgen; do not edit. */

#ifndef UNRAVEL_H
#define UNRAVEL_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Result code of every fallible call.
 */
typedef enum UnravelStatus {
  UNRAVEL_STATUS_OK = 0,
  UNRAVEL_STATUS_NULL_POINTER = 1,
  UNRAVEL_STATUS_INVALID_ARGUMENT = 2,
  /*
   Generator or state fails a structural check.
   */
  UNRAVEL_STATUS_INVALID_MODEL = 3,
  /*
   Dynamics is not positive at a state reached during the call.
   */
  UNRAVEL_STATUS_NOT_POSITIVE = 4,
  /*
   Numerical failure (non-PSD noise covariance, unstable integration).
   */
  UNRAVEL_STATUS_NUMERICAL = 5,
  UNRAVEL_STATUS_PANIC = 6,
} UnravelStatus;

typedef enum UnravelClass {
  UNRAVEL_CLASS_CP = 0,
  UNRAVEL_CLASS_POSITIVE_NOT_CP = 1,
  UNRAVEL_CLASS_NOT_POSITIVE = 2,
  UNRAVEL_CLASS_UNDETERMINED = 3,
} UnravelClass;

typedef enum UnravelKind {
  /*
   Diffusive, `S = 0`.
   */
  UNRAVEL_KIND_QSD = 0,
  /*
   Diffusive, `s = 1` in the eigenframe of `W`.
   */
  UNRAVEL_KIND_MAXIMAL_S = 1,
  UNRAVEL_KIND_JUMP = 2,
  /*
   Lindblad-form QSD; needs a generator built from Lindblad operators.
   */
  UNRAVEL_KIND_CP_QSD = 3,
} UnravelKind;

/*
 Opaque generator handle.
 */
typedef struct UnravelGenerator UnravelGenerator;

typedef struct UnravelValidation {
  bool pass;
  double max_trace_distance;
  double mc_error_estimate;
  double tolerance;
  size_t n_trajectories;
} UnravelValidation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null. The pointer is
 valid until the next failing call on the same thread.
 */
const char *unravel_last_error(void);

/*
 Builds a catalog model (see `unravel list-models`). Parameters not given
 take their defaults.

 # Safety
 `name` must be a NUL-terminated string; `param_names` and `param_values`
 must each point to `n_params` valid entries (or be null when
 `n_params == 0`); `out` must be writable.
 */
enum UnravelStatus unravel_model_new(const char *name,
                                     const char *const *param_names,
                                     const double *param_values,
                                     size_t n_params,
                                     struct UnravelGenerator **out);

/*
 Builds `−i[H,ρ] + Σ_α (F_α ρ F_α† − ½{F_α†F_α, ρ})` from `n_ops`
 operators stored back to back in `operators`.

 # Safety
 `hamiltonian` must hold `2·dim·dim` doubles, `operators` `n_ops` times
 that (or be null when `n_ops == 0`); `out` must be writable.
 */
enum UnravelStatus unravel_lindblad_new(size_t dim,
                                        const double *hamiltonian,
                                        const double *operators,
                                        size_t n_ops,
                                        struct UnravelGenerator **out);

/*
 Builds `−i[H,ρ] + Σ_ij K_ij (G_i ρ G_j† − ½{G_j†G_i, ρ})` with Hermitian,
 possibly indefinite `K` (`n_basis × n_basis`, row-major).

 # Safety
 `hamiltonian` must hold `2·dim·dim` doubles, `basis` `n_basis` times that,
 `coefficients` `2·n_basis·n_basis`; `out` must be writable.
 */
enum UnravelStatus unravel_kossakowski_new(size_t dim,
                                           const double *hamiltonian,
                                           const double *basis,
                                           size_t n_basis,
                                           const double *coefficients,
                                           struct UnravelGenerator **out);

/*
 Releases a generator. Null is ignored.

 # Safety
 `handle` must come from an `unravel_*_new` call and not be used again.
 */
void unravel_generator_free(struct UnravelGenerator *handle);

/*
 Hilbert-space dimension, or 0 for a null handle.

 # Safety
 `handle` must be null or a live generator.
 */
size_t unravel_generator_dim(const struct UnravelGenerator *handle);

/*
 Classifies the generator by sampling `samples` random states.
 `witness` (nullable, `2·dim` doubles) receives the state with the least
 transition rate found.

 # Safety
 `handle` must be live; `class_out`, `min_eigenvalue` and
 `choi_min_eigenvalue` must be writable; `witness` null or writable.
 */
enum UnravelStatus unravel_classify(const struct UnravelGenerator *handle,
                                    size_t samples,
                                    bool refine,
                                    uint64_t seed,
                                    enum UnravelClass *class_out,
                                    double *min_eigenvalue,
                                    double *choi_min_eigenvalue,
                                    double *witness);

/*
 Transition rate operator `W` (`2·dim·dim`), total rate `w` and frictional
 drift `(L − ⟨L⟩)ψ` (`2·dim`) at the normalized state `psi`. Any output
 pointer may be null.

 # Safety
 `handle` must be live, `psi` must hold `2·dim` doubles, non-null outputs
 must be writable for their sizes.
 */
enum UnravelStatus unravel_rate_structure(const struct UnravelGenerator *handle,
                                          const double *psi,
                                          double *w_out,
                                          double *rate_out,
                                          double *drift_out);

/*
 Runs `trajectories ≥ 100` trajectories of the chosen unraveling from
 `psi0` and compares their mean with the master equation.

 # Safety
 `handle` must be live, `psi0` must hold `2·dim` doubles, `out` must be
 writable.
 */
enum UnravelStatus unravel_validate(const struct UnravelGenerator *handle,
                                    const double *psi0,
                                    enum UnravelKind kind,
                                    double dt,
                                    double t_final,
                                    size_t trajectories,
                                    uint64_t seed,
                                    size_t record_stride,
                                    double tolerance,
                                    struct UnravelValidation *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNRAVEL_H */

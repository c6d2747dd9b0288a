#ifndef KAKEYA_LAB_H
#define KAKEYA_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum KlStatus {
  KL_STATUS_OK = 0,
  KL_STATUS_RANK_DEFICIENT = 1,
  KL_STATUS_DIMENSION_MISMATCH = 2,
  KL_STATUS_BAD_DIMENSIONS = 3,
  KL_STATUS_DEGENERATE_SPHERE = 4,
  KL_STATUS_LENGTH_MISMATCH = 5,
  KL_STATUS_ZERO_FREQUENCY = 6,
  KL_STATUS_GRID_BELOW_RESOLUTION = 7,
  KL_STATUS_INSUFFICIENT_GRID = 8,
  KL_STATUS_BAD_PARAMETERS = 9,
  // A required pointer argument was null.
  KL_STATUS_NULL_POINTER = 10,
  // The library panicked; this is a bug.
  KL_STATUS_PANIC = 11,
} KlStatus;

// Translation choice for [`kl_spec_new`].
typedef enum KlTranslation {
  KL_TRANSLATION_ZERO = 0,
  // Independent uniform points of `[0, side]^d`.
  KL_TRANSLATION_RANDOM_BOX = 1,
} KlTranslation;

// Opaque probability measure on finitely many `k`-planes.
typedef struct KlMeasure KlMeasure;

// Opaque orientation measure with translations and the standard bump.
typedef struct KlSpec KlSpec;

// The two terms of the slab/tail split of the decay bound.
typedef struct KlSplitBound {
  double eta;
  double n;
  double slab_term;
  double tail_term;
  double total;
} KlSplitBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or an empty
// string after a successful call. Valid until the next call on this thread.
const char *kl_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *kl_version(void);

// Distance between the spans of two sets of `k` vectors in `R^d`.
//
// # Safety
// `s` and `t` must each point to `k * d` doubles; `out` must be writable.
enum KlStatus kl_metric(size_t d, size_t k, const double *s, const double *t, double *out);

// Fourier transform of the normalized bump at `u`.
//
// # Safety
// `re` and `im` must be writable.
enum KlStatus kl_phi_hat(double u, double *re, double *im);

// Invariant measure on `G(d,k)` discretized by a `1/n`-net.
//
// # Safety
// `out` must be writable; on success it receives a handle for [`kl_measure_free`].
enum KlStatus kl_measure_uniform(size_t d,
                                 size_t k,
                                 size_t n,
                                 size_t budget,
                                 uint64_t seed,
                                 struct KlMeasure **out);

// `m` lines whose directions make angle `polar_angle` with `axis`.
//
// # Safety
// `axis` must point to `d` doubles; `out` must be writable.
enum KlStatus kl_measure_sphere(size_t d,
                                const double *axis,
                                double polar_angle,
                                size_t m,
                                uint64_t seed,
                                struct KlMeasure **out);

// Invariant measure on the `k`-planes inside the hyperplane spanned by the
// `d - 1` vectors of `v`.
//
// # Safety
// `v` must point to `(d - 1) * d` doubles; `out` must be writable.
enum KlStatus kl_measure_hyperplane(size_t d,
                                    size_t k,
                                    const double *v,
                                    size_t n,
                                    size_t budget,
                                    uint64_t seed,
                                    struct KlMeasure **out);

// Number of atoms, or 0 for a null handle.
//
// # Safety
// `measure` must be null or a live handle.
size_t kl_measure_len(const struct KlMeasure *measure);

// Ambient dimension `d`, or 0 for a null handle.
//
// # Safety
// `measure` must be null or a live handle.
size_t kl_measure_ambient_dim(const struct KlMeasure *measure);

// Releases a measure handle. Null is ignored. Specs built from the
// measure stay valid.
//
// # Safety
// `measure` must be null or a live handle not freed before.
void kl_measure_free(struct KlMeasure *measure);

// Mass of the atoms inside the slab of frequency `xi` and width `eta`.
//
// # Safety
// `xi` must point to `xi_len` doubles; `out` must be writable.
enum KlStatus kl_slab_mass(const struct KlMeasure *measure,
                           const double *xi,
                           size_t xi_len,
                           double eta,
                           double *out);

// Largest slab mass found by a search over `search_budget` directions.
// `direction` may be null; otherwise it receives the `d` coordinates of
// the worst direction.
//
// # Safety
// `mass` must be writable; `direction` must be null or hold `d` doubles.
enum KlStatus kl_worst_case_slab_mass(const struct KlMeasure *measure,
                                      double eta,
                                      size_t search_budget,
                                      uint64_t seed,
                                      double *mass,
                                      double *direction);

// Fitted scaling exponent over a decreasing `eta` grid. `sup_masses` may
// be null; otherwise it receives one mass per grid point.
//
// # Safety
// `eta` must hold `eta_len` doubles; `beta_hat` and `r_squared` must be
// writable; `sup_masses` must be null or hold `eta_len` doubles.
enum KlStatus kl_fit_beta(const struct KlMeasure *measure,
                          const double *eta,
                          size_t eta_len,
                          size_t search_budget,
                          uint64_t seed,
                          double *beta_hat,
                          double *r_squared,
                          double *sup_masses);

// Attaches generated translations to a measure. `side` is used only by
// [`KlTranslation::RandomBox`].
//
// # Safety
// `measure` must be a live handle; `out` must be writable.
enum KlStatus kl_spec_new(const struct KlMeasure *measure,
                          enum KlTranslation strategy,
                          double side,
                          uint64_t seed,
                          struct KlSpec **out);

// Attaches explicit translations, one `d`-vector per atom in atom order.
//
// # Safety
// `translations` must hold `len` doubles; `out` must be writable.
enum KlStatus kl_spec_with_translations(const struct KlMeasure *measure,
                                        const double *translations,
                                        size_t len,
                                        struct KlSpec **out);

// Zero-translation measure on the cone of lines at angle π/4 to `e_d`.
//
// # Safety
// `out` must be writable.
enum KlStatus kl_spec_cone(size_t d, size_t m, uint64_t seed, struct KlSpec **out);

// Releases a spec handle. Null is ignored.
//
// # Safety
// `spec` must be null or a live handle not freed before.
void kl_spec_free(struct KlSpec *spec);

// Fourier transform of the measure at `xi`.
//
// # Safety
// `xi` must hold `xi_len` doubles; `re` and `im` must be writable.
enum KlStatus kl_mu_hat(const struct KlSpec *spec,
                        const double *xi,
                        size_t xi_len,
                        double *re,
                        double *im);

// Translation-free upper bound for `|μ̂(xi)|`.
//
// # Safety
// `xi` must hold `xi_len` doubles; `out` must be writable.
enum KlStatus kl_mu_hat_envelope(const struct KlSpec *spec,
                                 const double *xi,
                                 size_t xi_len,
                                 double *out);

// Slab and tail terms of the decay bound at `|ξ| = xi_norm`.
//
// # Safety
// `out` must be writable.
enum KlStatus kl_split_bound(double beta, double alpha, double xi_norm, struct KlSplitBound *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KAKEYA_LAB_H */

/* lindml: linear (Mahalanobis) distance metric learning from noisily
 * labeled Close/Far pairs.
 *
 * C interface over the core library: opaque handles, integer status codes,
 * and a per-thread last-error message. Every function that can fail returns
 * lindml_status; out-parameters are written only on LINDML_OK.
 *
 * Handles returned through *out parameters are owned by the caller and must
 * be released with the matching *_free function.
 */

#ifndef LINDML_H_
#define LINDML_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lindml_status {
  LINDML_OK = 0,
  LINDML_ERR_INVALID_ARGUMENT = 1,
  LINDML_ERR_DIMENSION_MISMATCH = 2,
  LINDML_ERR_DOMAIN = 3,
  LINDML_ERR_IO = 4,
  LINDML_ERR_DIVERGED = 5,
  LINDML_ERR_INFEASIBLE = 6,
  LINDML_ERR_INTERNAL = 7
} lindml_status;

typedef enum lindml_noise_kind {
  LINDML_NOISE_LOGISTIC = 0,
  LINDML_NOISE_NORMAL = 1,
  LINDML_NOISE_LAPLACE = 2,
  LINDML_NOISE_HYPERBOLIC_SECANT = 3
} lindml_noise_kind;

typedef enum lindml_label_channel {
  LINDML_LABELS_NOISY = 0,
  LINDML_LABELS_CLEAN = 1
} lindml_label_channel;

typedef enum lindml_regime {
  LINDML_REGIME_NORM_NOISE = 0,
  LINDML_REGIME_LABEL_FLIP = 1
} lindml_regime;

typedef struct lindml_metric_model lindml_metric_model;
typedef struct lindml_factor_model lindml_factor_model;
typedef struct lindml_dataset lindml_dataset;
typedef struct lindml_fit_result lindml_fit_result;

const char* lindml_version(void);

/* Message for the most recent failure on this thread; empty string if the
 * last call succeeded. The pointer stays valid until the next API call on
 * the same thread. */
const char* lindml_last_error(void);

/* ---------- noise models ---------- */

lindml_status lindml_log_cdf(lindml_noise_kind kind, double scale, double a,
                             double* out);
lindml_status lindml_cdf(lindml_noise_kind kind, double scale, double a,
                         double* out);
lindml_status lindml_pdf(lindml_noise_kind kind, double scale, double a,
                         double* out);
lindml_status lindml_neg_log_cdf_deriv(lindml_noise_kind kind, double scale,
                                       double a, double* out);
lindml_status lindml_quantile(lindml_noise_kind kind, double scale, double u,
                              double* out);
/* n i.i.d. draws into out[0..n-1]; deterministic given seed. */
lindml_status lindml_noise_sample(lindml_noise_kind kind, double scale,
                                  uint64_t seed, size_t n, double* out);
/* Interval constants on [-beta_f, beta_f]: Lipschitz bound of -log CDF,
 * maximum loss value, and minimum density. */
lindml_status lindml_noise_constants(lindml_noise_kind kind, double scale,
                                     double beta_f, double* zeta,
                                     double* big_t, double* omega);

/* ---------- metric models ---------- */

/* matrix is row-major dim x dim, symmetric PSD; tau >= 0. */
lindml_status lindml_metric_model_create(int dim, const double* matrix,
                                         double tau, lindml_metric_model** out);
void lindml_metric_model_free(lindml_metric_model* model);
int lindml_metric_model_dim(const lindml_metric_model* model);
double lindml_metric_model_tau(const lindml_metric_model* model);
/* Copies the matrix into out (row-major, dim*dim entries). */
lindml_status lindml_metric_model_matrix(const lindml_metric_model* model,
                                         double* out);
/* Eigenvalues in descending order into out (dim entries). */
lindml_status lindml_metric_model_eigenvalues(const lindml_metric_model* model,
                                              double* out);
lindml_status lindml_mahalanobis_sq(const lindml_metric_model* model,
                                    const double* z, double* out);
/* +1 (Far) iff the squared distance reaches tau; ties are Far. */
lindml_status lindml_predict(const lindml_metric_model* model, const double* z,
                             int* out);
/* Keeps the k largest eigenvalues; *gamma is the largest zeroed one. */
lindml_status lindml_truncate_metric(const lindml_metric_model* model, int k,
                                     lindml_metric_model** out, double* gamma);
/* ||M1 - M2||_2 + |tau1 - tau2|. */
lindml_status lindml_model_distance(const lindml_metric_model* a,
                                    const lindml_metric_model* b, double* out);
/* Relative errors of (M/tau) against the reference in spectral and
 * Frobenius norms. */
lindml_status lindml_relative_errors(const lindml_metric_model* hat,
                                     const lindml_metric_model* star,
                                     double* rel_spectral,
                                     double* rel_frobenius);
/* Model for data transformed by z' = U z (u row-major, nonsingular). */
lindml_status lindml_unit_change(const lindml_metric_model* model,
                                 const double* u, lindml_metric_model** out);
/* factor_or_null additionally embeds the unconstrained parameterization in
 * the model document. */
lindml_status lindml_metric_model_save(const lindml_metric_model* model,
                                       uint64_t seed, const char* noise_kind,
                                       const char* created,
                                       const lindml_factor_model* factor_or_null,
                                       const char* path);
lindml_status lindml_metric_model_load(const char* path,
                                       lindml_metric_model** out);

/* ---------- factor models ---------- */

/* factor is row-major dim x rank_bound; tau unconstrained. */
lindml_status lindml_factor_model_create(int dim, int rank_bound,
                                         const double* factor, double tau,
                                         lindml_factor_model** out);
void lindml_factor_model_free(lindml_factor_model* model);
int lindml_factor_model_dim(const lindml_factor_model* model);
int lindml_factor_model_rank_bound(const lindml_factor_model* model);
double lindml_factor_model_tau(const lindml_factor_model* model);
lindml_status lindml_factor_model_factor(const lindml_factor_model* model,
                                         double* out);
/* M = A A^T with tau clamped to zero at this boundary. */
lindml_status lindml_factor_to_metric(const lindml_factor_model* model,
                                      lindml_metric_model** out);
/* Keeps the k largest singular values; *gamma_sv is the largest zeroed. */
lindml_status lindml_truncate_factor(const lindml_factor_model* model, int k,
                                     lindml_factor_model** out,
                                     double* gamma_sv);

/* ---------- datasets ---------- */

/* z row-major n x dim; labels (and clean_labels when non-NULL) in {-1,+1}. */
lindml_status lindml_dataset_create(int dim, int n, const double* z,
                                    const int* labels, const int* clean_labels,
                                    lindml_dataset** out);
void lindml_dataset_free(lindml_dataset* data);
int lindml_dataset_dim(const lindml_dataset* data);
int lindml_dataset_size(const lindml_dataset* data);
int lindml_dataset_has_clean(const lindml_dataset* data);
lindml_status lindml_dataset_labels(const lindml_dataset* data,
                                    lindml_label_channel which, int* out);
lindml_status lindml_dataset_row(const lindml_dataset* data, int i,
                                 double* out);
/* F = max ||z||^2 over the pairs (0 for an empty dataset). */
lindml_status lindml_dataset_support_bound(const lindml_dataset* data,
                                           double* out);
lindml_status lindml_dataset_slice(const lindml_dataset* data, int start,
                                   int count, lindml_dataset** out);
lindml_status lindml_dataset_save(const lindml_dataset* data,
                                  const char* path);
lindml_status lindml_dataset_load(const char* path, lindml_dataset** out);

/* ---------- synthetic generation ---------- */

typedef struct lindml_synthetic_spec {
  int dim;
  int rank;
  const double* m_star_eigs; /* rank entries */
  const double* sigma_eigs;  /* dim entries */
  double tau_star;
  int n_pairs;
  lindml_regime regime;
  lindml_noise_kind noise_kind; /* norm-noise regime */
  double target_mislabel;       /* norm-noise regime, in [0, 0.5) */
  double flip_p;                /* label-flip regime, in [0, 1] */
  uint64_t seed;
} lindml_synthetic_spec;

/* Fills spec with the canonical synthetic configuration (d=10 rank-5
 * ground truth, tau*=1.3, 20000 pairs, logistic noise at 10% mislabel).
 * The eigenvalue pointers are set to static storage. */
void lindml_synthetic_spec_default(lindml_synthetic_spec* spec);

/* Generates data and ground truth. Any out pointer may be NULL to skip.
 * realized_mislabel is the fraction of noisy labels differing from clean;
 * noise_scale is the calibrated scale (norm-noise regime). */
lindml_status lindml_generate(const lindml_synthetic_spec* spec,
                              lindml_dataset** out_data,
                              lindml_metric_model** out_star,
                              double* realized_mislabel, double* noise_scale);

/* Writes the generation sidecar document. */
lindml_status lindml_write_sidecar(const lindml_synthetic_spec* spec,
                                   double realized_mislabel,
                                   double noise_scale, double far_fraction,
                                   double support_bound, int train_count,
                                   int test_count, const char* path);

/* Scale s at which the expected mislabel fraction over the dataset's pairs
 * meets `target` within 1e-4 under the given ground truth. */
lindml_status lindml_calibrate_noise_scale(const lindml_dataset* data,
                                           const lindml_metric_model* star,
                                           lindml_noise_kind kind,
                                           double target, double* out);

/* ---------- risk ---------- */

lindml_status lindml_empirical_risk_metric(const lindml_dataset* data,
                                           lindml_noise_kind kind,
                                           double scale,
                                           const lindml_metric_model* model,
                                           double* out);
lindml_status lindml_empirical_risk_factor(const lindml_dataset* data,
                                           lindml_noise_kind kind,
                                           double scale,
                                           const lindml_factor_model* model,
                                           double* out);

/* ---------- solver ---------- */

typedef struct lindml_solver_config {
  double learning_rate;
  double decay;
  int max_iters;
  int rank_bound; /* 0 = full rank */
  double init_scale;
  uint64_t seed;
  int batch_size; /* 0 = full batch */
  double stop_tol;
  int history_stride;
  int decay_interval;
} lindml_solver_config;

/* Canonical defaults: lr 0.5, decay 0.95 every 100 iterations, 30000
 * iterations, full rank, init scale 1e-4, full batch. */
void lindml_solver_config_default(lindml_solver_config* cfg);

lindml_status lindml_fit(const lindml_dataset* data, lindml_noise_kind kind,
                         double scale, const lindml_solver_config* cfg,
                         lindml_fit_result** out);
/* Projected-gradient reference solver (dim <= 32). */
lindml_status lindml_fit_projected(const lindml_dataset* data,
                                   lindml_noise_kind kind, double scale,
                                   const lindml_solver_config* cfg,
                                   lindml_metric_model** out);
void lindml_fit_result_free(lindml_fit_result* fit);
lindml_status lindml_fit_result_model(const lindml_fit_result* fit,
                                      lindml_factor_model** out);
int lindml_fit_result_iterations(const lindml_fit_result* fit);
double lindml_fit_result_wall_time(const lindml_fit_result* fit);
int lindml_fit_result_history_size(const lindml_fit_result* fit);
lindml_status lindml_fit_result_history(const lindml_fit_result* fit,
                                        int* iterations, double* values);

/* ---------- evaluation ---------- */

lindml_status lindml_accuracy(const lindml_metric_model* model,
                              const lindml_dataset* data,
                              lindml_label_channel which, double* out);

typedef struct lindml_eval_report {
  double train_acc_noisy;
  double train_acc_clean;
  double test_acc_noisy;
  double test_acc_clean;
  int has_clean;
  double rel_spectral;
  double rel_frobenius;
  int has_star;
  double loss_final;
  double realized_mislabel;
  int iterations_run;
  double wall_time;
} lindml_eval_report;

/* star may be NULL; star-dependent fields are then absent (has_star = 0). */
lindml_status lindml_evaluate(const lindml_fit_result* fit,
                              const lindml_dataset* train,
                              const lindml_dataset* test,
                              const lindml_metric_model* star,
                              lindml_eval_report* out);
lindml_status lindml_eval_report_save(const lindml_eval_report* report,
                                      const char* path);
/* As lindml_eval_report_save, with the descending spectra of
 * M_hat/tau_hat and M_star/tau_star (either may be NULL; spectra_len
 * entries each). */
lindml_status lindml_eval_report_save_full(const lindml_eval_report* report,
                                           const double* eig_hat,
                                           const double* eig_star,
                                           int spectra_len, const char* path);

/* Uniform-convergence sample count for accuracy eps at confidence 1-delta;
 * *meta_ok (optional) reports whether B <= beta*F. */
lindml_status lindml_sample_complexity(double eps, double delta, int d,
                                       double zeta, double big_f,
                                       double big_b, double beta,
                                       double big_t, int* meta_ok,
                                       double* out);
/* log of the covering number of the model class at radius alpha. */
lindml_status lindml_log_cover_size(double alpha, int d, double big_b,
                                    double beta, double* out);
/* Risk gap guaranteeing parameter recovery within eps; natural-log value
 * plus the linear value (which may underflow to 0). */
lindml_status lindml_recovery_bound(double eps, int d, double c, double omega,
                                    double* log_value, double* value);

lindml_status lindml_eval_report_csv_header(char* buf, size_t size);
lindml_status lindml_eval_report_csv_row(const lindml_eval_report* report,
                                         char* buf, size_t size);

/* ---------- preprocessing ---------- */

typedef enum lindml_normalize_mode {
  LINDML_NORMALIZE_NONE = 0,
  LINDML_NORMALIZE_STANDARDIZE = 1,
  LINDML_NORMALIZE_WHITEN = 2
} lindml_normalize_mode;

/* Computes the linear preprocessing transform z' = U z from the data,
 * applies it, and copies U (row-major dim x dim) into u when non-NULL.
 * Whitening uses the pseudo-inverse square root of the second-moment
 * matrix, so U may be singular in degenerate directions. */
lindml_status lindml_dataset_normalize(const lindml_dataset* data,
                                       lindml_normalize_mode mode,
                                       lindml_dataset** out, double* u);

/* Maps a model fitted on U-transformed data back to original units:
 * M = U^T M' U, tau unchanged. */
lindml_status lindml_back_transform(const lindml_metric_model* model,
                                    const double* u,
                                    lindml_metric_model** out);
lindml_status lindml_back_transform_factor(const lindml_factor_model* model,
                                           const double* u,
                                           lindml_factor_model** out);

/* ---------- fit artifacts ---------- */

/* Writes the fitted model (with its factor payload) and/or the loss
 * history; either path may be NULL to skip, not both. */
lindml_status lindml_fit_result_save(const lindml_fit_result* fit,
                                     uint64_t seed, const char* noise_kind,
                                     const char* created,
                                     const char* model_path_or_null,
                                     const char* history_path_or_null);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LINDML_H_ */

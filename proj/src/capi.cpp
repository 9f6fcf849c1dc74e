#include "lindml.h"

#include <cstring>
#include <exception>
#include <optional>
#include <string>

#include "core/datagen.hpp"
#include "core/errors.hpp"
#include "core/evaluation.hpp"
#include "core/io.hpp"
#include "core/metric.hpp"
#include "core/noise.hpp"
#include "core/normalize.hpp"
#include "core/risk.hpp"
#include "core/solver.hpp"
#include "core/types.hpp"

struct lindml_metric_model {
  lindml::MetricModel value;
};
struct lindml_factor_model {
  lindml::FactorModel value;
};
struct lindml_dataset {
  lindml::Dataset value;
};
struct lindml_fit_result {
  lindml::FitResult value;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
lindml_status wrap(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LINDML_OK;
  } catch (const lindml::DimensionError& e) {
    g_last_error = e.what();
    return LINDML_ERR_DIMENSION_MISMATCH;
  } catch (const lindml::DomainError& e) {
    g_last_error = e.what();
    return LINDML_ERR_DOMAIN;
  } catch (const lindml::IoError& e) {
    g_last_error = e.what();
    return LINDML_ERR_IO;
  } catch (const lindml::DivergenceError& e) {
    g_last_error = e.what();
    return LINDML_ERR_DIVERGED;
  } catch (const lindml::InfeasibleError& e) {
    g_last_error = e.what();
    return LINDML_ERR_INFEASIBLE;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return LINDML_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LINDML_ERR_INTERNAL;
  }
}

lindml_status fail_null(const char* what) {
  g_last_error = std::string(what) + ": null pointer argument";
  return LINDML_ERR_INVALID_ARGUMENT;
}

lindml::NoiseKind to_kind(lindml_noise_kind kind) {
  switch (kind) {
    case LINDML_NOISE_LOGISTIC: return lindml::NoiseKind::kLogistic;
    case LINDML_NOISE_NORMAL: return lindml::NoiseKind::kNormal;
    case LINDML_NOISE_LAPLACE: return lindml::NoiseKind::kLaplace;
    case LINDML_NOISE_HYPERBOLIC_SECANT:
      return lindml::NoiseKind::kHyperbolicSecant;
  }
  throw lindml::DomainError("unknown noise kind code");
}

lindml::NoiseSpec to_noise(lindml_noise_kind kind, double scale) {
  lindml::NoiseSpec spec{to_kind(kind), scale};
  lindml::validate(spec);
  return spec;
}

lindml::Matrix row_major_matrix(const double* data, int rows, int cols) {
  lindml::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = data[i * cols + j];
  }
  return m;
}

void copy_row_major(const lindml::Matrix& m, double* out) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  }
}

lindml::SolverConfig to_config(const lindml_solver_config* cfg) {
  lindml::SolverConfig out;
  out.learning_rate = cfg->learning_rate;
  out.decay = cfg->decay;
  out.max_iters = cfg->max_iters;
  out.rank_bound = cfg->rank_bound;
  out.init_scale = cfg->init_scale;
  out.seed = cfg->seed;
  out.batch_size = cfg->batch_size;
  out.stop_tol = cfg->stop_tol;
  out.history_stride = cfg->history_stride;
  out.decay_interval = cfg->decay_interval;
  return out;
}

lindml::SyntheticSpec to_spec(const lindml_synthetic_spec* spec) {
  lindml::SyntheticSpec out;
  out.dim = spec->dim;
  out.rank = spec->rank;
  out.m_star_eigs.assign(spec->m_star_eigs, spec->m_star_eigs + spec->rank);
  out.sigma_eigs.assign(spec->sigma_eigs, spec->sigma_eigs + spec->dim);
  out.tau_star = spec->tau_star;
  out.n_pairs = spec->n_pairs;
  out.regime = spec->regime == LINDML_REGIME_NORM_NOISE
                   ? lindml::NoiseRegime::kNormNoise
                   : lindml::NoiseRegime::kLabelFlip;
  out.noise_kind = to_kind(spec->noise_kind);
  out.target_mislabel = spec->target_mislabel;
  out.flip_p = spec->flip_p;
  out.seed = spec->seed;
  return out;
}

const double kDefaultMStarEigs[] = {0.32, 0.89, 0.59, 0.13, 0.14};
const double kDefaultSigmaEigs[] = {0.73, 0.7,  0.68, 0.59, 0.47,
                                    0.45, 0.21, 0.19, 0.11, 0.04};

}  // namespace

extern "C" {

const char* lindml_version(void) { return "0.1.0"; }

const char* lindml_last_error(void) { return g_last_error.c_str(); }

/* ---------- noise models ---------- */

#define LINDML_NOISE_FN(NAME, CORE)                                         \
  lindml_status NAME(lindml_noise_kind kind, double scale, double a,         \
                     double* out) {                                          \
    if (out == nullptr) return fail_null(#NAME);                             \
    return wrap([&] { *out = CORE(to_noise(kind, scale), a); });             \
  }

LINDML_NOISE_FN(lindml_log_cdf, lindml::log_cdf)
LINDML_NOISE_FN(lindml_cdf, lindml::cdf)
LINDML_NOISE_FN(lindml_pdf, lindml::pdf)
LINDML_NOISE_FN(lindml_neg_log_cdf_deriv, lindml::neg_log_cdf_deriv)
LINDML_NOISE_FN(lindml_quantile, lindml::quantile)

#undef LINDML_NOISE_FN

lindml_status lindml_noise_sample(lindml_noise_kind kind, double scale,
                                  uint64_t seed, size_t n, double* out) {
  if (n > 0 && out == nullptr) return fail_null("lindml_noise_sample");
  return wrap([&] {
    lindml::Rng rng(seed);
    const auto draws = lindml::sample(to_noise(kind, scale), rng, n);
    std::memcpy(out, draws.data(), n * sizeof(double));
  });
}

lindml_status lindml_noise_constants(lindml_noise_kind kind, double scale,
                                     double beta_f, double* zeta,
                                     double* big_t, double* omega) {
  if (zeta == nullptr || big_t == nullptr || omega == nullptr) {
    return fail_null("lindml_noise_constants");
  }
  return wrap([&] {
    const auto c = lindml::constants(to_noise(kind, scale), beta_f);
    *zeta = c.zeta;
    *big_t = c.big_t;
    *omega = c.omega;
  });
}

/* ---------- metric models ---------- */

lindml_status lindml_metric_model_create(int dim, const double* matrix,
                                         double tau,
                                         lindml_metric_model** out) {
  if (matrix == nullptr || out == nullptr) {
    return fail_null("lindml_metric_model_create");
  }
  return wrap([&] {
    lindml::MetricModel model;
    model.m = row_major_matrix(matrix, dim, dim);
    model.tau = tau;
    lindml::validate(model);
    *out = new lindml_metric_model{std::move(model)};
  });
}

void lindml_metric_model_free(lindml_metric_model* model) { delete model; }

int lindml_metric_model_dim(const lindml_metric_model* model) {
  return model == nullptr ? 0 : model->value.dim();
}

double lindml_metric_model_tau(const lindml_metric_model* model) {
  return model == nullptr ? 0.0 : model->value.tau;
}

lindml_status lindml_metric_model_matrix(const lindml_metric_model* model,
                                         double* out) {
  if (model == nullptr || out == nullptr) {
    return fail_null("lindml_metric_model_matrix");
  }
  return wrap([&] { copy_row_major(model->value.m, out); });
}

lindml_status lindml_metric_model_eigenvalues(const lindml_metric_model* model,
                                              double* out) {
  if (model == nullptr || out == nullptr) {
    return fail_null("lindml_metric_model_eigenvalues");
  }
  return wrap([&] {
    const auto ed = lindml::sym_eigendecomp(model->value.m);
    std::memcpy(out, ed.eigenvalues.data(),
                ed.eigenvalues.size() * sizeof(double));
  });
}

lindml_status lindml_mahalanobis_sq(const lindml_metric_model* model,
                                    const double* z, double* out) {
  if (model == nullptr || z == nullptr || out == nullptr) {
    return fail_null("lindml_mahalanobis_sq");
  }
  return wrap([&] {
    const lindml::Vector v =
        Eigen::Map<const lindml::Vector>(z, model->value.dim());
    *out = lindml::mahalanobis_sq(model->value, v);
  });
}

lindml_status lindml_predict(const lindml_metric_model* model, const double* z,
                             int* out) {
  if (model == nullptr || z == nullptr || out == nullptr) {
    return fail_null("lindml_predict");
  }
  return wrap([&] {
    const lindml::Vector v =
        Eigen::Map<const lindml::Vector>(z, model->value.dim());
    *out = lindml::predict(model->value, v);
  });
}

lindml_status lindml_truncate_metric(const lindml_metric_model* model, int k,
                                     lindml_metric_model** out,
                                     double* gamma) {
  if (model == nullptr || out == nullptr) {
    return fail_null("lindml_truncate_metric");
  }
  return wrap([&] {
    auto [truncated, g] = lindml::truncate_metric(model->value, k);
    if (gamma != nullptr) *gamma = g;
    *out = new lindml_metric_model{std::move(truncated)};
  });
}

lindml_status lindml_model_distance(const lindml_metric_model* a,
                                    const lindml_metric_model* b,
                                    double* out) {
  if (a == nullptr || b == nullptr || out == nullptr) {
    return fail_null("lindml_model_distance");
  }
  return wrap([&] { *out = lindml::model_distance(a->value, b->value); });
}

lindml_status lindml_relative_errors(const lindml_metric_model* hat,
                                     const lindml_metric_model* star,
                                     double* rel_spectral,
                                     double* rel_frobenius) {
  if (hat == nullptr || star == nullptr || rel_spectral == nullptr ||
      rel_frobenius == nullptr) {
    return fail_null("lindml_relative_errors");
  }
  return wrap([&] {
    const auto err = lindml::relative_errors(hat->value, star->value);
    *rel_spectral = err.spectral;
    *rel_frobenius = err.frobenius;
  });
}

lindml_status lindml_unit_change(const lindml_metric_model* model,
                                 const double* u, lindml_metric_model** out) {
  if (model == nullptr || u == nullptr || out == nullptr) {
    return fail_null("lindml_unit_change");
  }
  return wrap([&] {
    const int d = model->value.dim();
    *out = new lindml_metric_model{
        lindml::unit_change(model->value, row_major_matrix(u, d, d))};
  });
}

lindml_status lindml_metric_model_save(const lindml_metric_model* model,
                                       uint64_t seed, const char* noise_kind,
                                       const char* created,
                                       const lindml_factor_model* factor_or_null,
                                       const char* path) {
  if (model == nullptr || path == nullptr) {
    return fail_null("lindml_metric_model_save");
  }
  return wrap([&] {
    lindml::ModelMetadata meta;
    meta.seed = seed;
    meta.noise_kind = noise_kind == nullptr ? "" : noise_kind;
    meta.created = created == nullptr ? "" : created;
    std::optional<lindml::FactorModel> factor;
    if (factor_or_null != nullptr) factor = factor_or_null->value;
    lindml::save_model(model->value, meta, path, factor);
  });
}

lindml_status lindml_metric_model_load(const char* path,
                                       lindml_metric_model** out) {
  if (path == nullptr || out == nullptr) {
    return fail_null("lindml_metric_model_load");
  }
  return wrap([&] {
    *out = new lindml_metric_model{lindml::load_model(path).model};
  });
}

/* ---------- factor models ---------- */

lindml_status lindml_factor_model_create(int dim, int rank_bound,
                                         const double* factor, double tau,
                                         lindml_factor_model** out) {
  if (factor == nullptr || out == nullptr) {
    return fail_null("lindml_factor_model_create");
  }
  return wrap([&] {
    lindml::FactorModel model;
    model.factor = row_major_matrix(factor, dim, rank_bound);
    model.tau = tau;
    lindml::validate(model);
    *out = new lindml_factor_model{std::move(model)};
  });
}

void lindml_factor_model_free(lindml_factor_model* model) { delete model; }

int lindml_factor_model_dim(const lindml_factor_model* model) {
  return model == nullptr ? 0 : model->value.dim();
}

int lindml_factor_model_rank_bound(const lindml_factor_model* model) {
  return model == nullptr ? 0 : model->value.rank_bound();
}

double lindml_factor_model_tau(const lindml_factor_model* model) {
  return model == nullptr ? 0.0 : model->value.tau;
}

lindml_status lindml_factor_model_factor(const lindml_factor_model* model,
                                         double* out) {
  if (model == nullptr || out == nullptr) {
    return fail_null("lindml_factor_model_factor");
  }
  return wrap([&] { copy_row_major(model->value.factor, out); });
}

lindml_status lindml_factor_to_metric(const lindml_factor_model* model,
                                      lindml_metric_model** out) {
  if (model == nullptr || out == nullptr) {
    return fail_null("lindml_factor_to_metric");
  }
  return wrap([&] {
    *out = new lindml_metric_model{lindml::factor_to_metric(model->value)};
  });
}

lindml_status lindml_truncate_factor(const lindml_factor_model* model, int k,
                                     lindml_factor_model** out,
                                     double* gamma_sv) {
  if (model == nullptr || out == nullptr) {
    return fail_null("lindml_truncate_factor");
  }
  return wrap([&] {
    auto [truncated, g] = lindml::truncate_factor(model->value, k);
    if (gamma_sv != nullptr) *gamma_sv = g;
    *out = new lindml_factor_model{std::move(truncated)};
  });
}

/* ---------- datasets ---------- */

lindml_status lindml_dataset_create(int dim, int n, const double* z,
                                    const int* labels, const int* clean_labels,
                                    lindml_dataset** out) {
  if ((n > 0 && (z == nullptr || labels == nullptr)) || out == nullptr) {
    return fail_null("lindml_dataset_create");
  }
  return wrap([&] {
    lindml::Matrix zm = n > 0 ? row_major_matrix(z, n, dim)
                              : lindml::Matrix(0, dim);
    lindml::IntVector lab(n);
    for (int i = 0; i < n; ++i) lab[i] = labels[i];
    std::optional<lindml::IntVector> clean;
    if (clean_labels != nullptr) {
      lindml::IntVector cv(n);
      for (int i = 0; i < n; ++i) cv[i] = clean_labels[i];
      clean = std::move(cv);
    }
    *out = new lindml_dataset{lindml::make_dataset(zm, lab, clean)};
  });
}

void lindml_dataset_free(lindml_dataset* data) { delete data; }

int lindml_dataset_dim(const lindml_dataset* data) {
  return data == nullptr ? 0 : data->value.dim;
}

int lindml_dataset_size(const lindml_dataset* data) {
  return data == nullptr ? 0 : data->value.num_pairs();
}

int lindml_dataset_has_clean(const lindml_dataset* data) {
  return data != nullptr && data->value.clean_labels.has_value() ? 1 : 0;
}

lindml_status lindml_dataset_labels(const lindml_dataset* data,
                                    lindml_label_channel which, int* out) {
  if (data == nullptr || out == nullptr) {
    return fail_null("lindml_dataset_labels");
  }
  return wrap([&] {
    if (which == LINDML_LABELS_CLEAN && !data->value.clean_labels) {
      throw lindml::DomainError("dataset has no clean label channel");
    }
    const lindml::IntVector& labels = which == LINDML_LABELS_CLEAN
                                          ? *data->value.clean_labels
                                          : data->value.labels;
    for (int i = 0; i < labels.size(); ++i) out[i] = labels[i];
  });
}

lindml_status lindml_dataset_row(const lindml_dataset* data, int i,
                                 double* out) {
  if (data == nullptr || out == nullptr) {
    return fail_null("lindml_dataset_row");
  }
  return wrap([&] {
    if (i < 0 || i >= data->value.num_pairs()) {
      throw lindml::DomainError("lindml_dataset_row: index out of range");
    }
    for (int j = 0; j < data->value.dim; ++j) out[j] = data->value.z(i, j);
  });
}

lindml_status lindml_dataset_support_bound(const lindml_dataset* data,
                                           double* out) {
  if (data == nullptr || out == nullptr) {
    return fail_null("lindml_dataset_support_bound");
  }
  return wrap([&] {
    *out = data->value.support_bound ? *data->value.support_bound : 0.0;
  });
}

lindml_status lindml_dataset_slice(const lindml_dataset* data, int start,
                                   int count, lindml_dataset** out) {
  if (data == nullptr || out == nullptr) {
    return fail_null("lindml_dataset_slice");
  }
  return wrap([&] {
    *out = new lindml_dataset{lindml::slice(data->value, start, count)};
  });
}

lindml_status lindml_dataset_save(const lindml_dataset* data,
                                  const char* path) {
  if (data == nullptr || path == nullptr) {
    return fail_null("lindml_dataset_save");
  }
  return wrap([&] { lindml::save_dataset(data->value, path); });
}

lindml_status lindml_dataset_load(const char* path, lindml_dataset** out) {
  if (path == nullptr || out == nullptr) {
    return fail_null("lindml_dataset_load");
  }
  return wrap([&] { *out = new lindml_dataset{lindml::load_dataset(path)}; });
}

/* ---------- synthetic generation ---------- */

void lindml_synthetic_spec_default(lindml_synthetic_spec* spec) {
  if (spec == nullptr) return;
  spec->dim = 10;
  spec->rank = 5;
  spec->m_star_eigs = kDefaultMStarEigs;
  spec->sigma_eigs = kDefaultSigmaEigs;
  spec->tau_star = 1.3;
  spec->n_pairs = 20000;
  spec->regime = LINDML_REGIME_NORM_NOISE;
  spec->noise_kind = LINDML_NOISE_LOGISTIC;
  spec->target_mislabel = 0.10;
  spec->flip_p = 0.2;
  spec->seed = 0;
}

lindml_status lindml_generate(const lindml_synthetic_spec* spec,
                              lindml_dataset** out_data,
                              lindml_metric_model** out_star,
                              double* realized_mislabel, double* noise_scale) {
  if (spec == nullptr || spec->m_star_eigs == nullptr ||
      spec->sigma_eigs == nullptr) {
    return fail_null("lindml_generate");
  }
  return wrap([&] {
    auto gen = lindml::generate(to_spec(spec));
    if (realized_mislabel != nullptr) *realized_mislabel = gen.realized_mislabel;
    if (noise_scale != nullptr) *noise_scale = gen.noise_scale;
    if (out_star != nullptr) {
      *out_star = new lindml_metric_model{std::move(gen.star)};
    }
    if (out_data != nullptr) {
      *out_data = new lindml_dataset{std::move(gen.data)};
    }
  });
}

lindml_status lindml_write_sidecar(const lindml_synthetic_spec* spec,
                                   double realized_mislabel,
                                   double noise_scale, double far_fraction,
                                   double support_bound, int train_count,
                                   int test_count, const char* path) {
  if (spec == nullptr || path == nullptr) {
    return fail_null("lindml_write_sidecar");
  }
  return wrap([&] {
    lindml::GenerationResult gen;
    gen.realized_mislabel = realized_mislabel;
    gen.noise_scale = noise_scale;
    gen.far_fraction = far_fraction;
    gen.data.support_bound = support_bound;
    lindml::save_sidecar(to_spec(spec), gen, train_count, test_count, path);
  });
}

lindml_status lindml_calibrate_noise_scale(const lindml_dataset* data,
                                           const lindml_metric_model* star,
                                           lindml_noise_kind kind,
                                           double target, double* out) {
  if (data == nullptr || star == nullptr || out == nullptr) {
    return fail_null("lindml_calibrate_noise_scale");
  }
  return wrap([&] {
    *out = lindml::calibrate_noise_scale(data->value.z, star->value.m,
                                         star->value.tau, to_kind(kind),
                                         target);
  });
}

/* ---------- risk ---------- */

lindml_status lindml_empirical_risk_metric(const lindml_dataset* data,
                                           lindml_noise_kind kind,
                                           double scale,
                                           const lindml_metric_model* model,
                                           double* out) {
  if (data == nullptr || model == nullptr || out == nullptr) {
    return fail_null("lindml_empirical_risk_metric");
  }
  return wrap([&] {
    lindml::RiskContext ctx{&data->value, to_noise(kind, scale)};
    *out = lindml::empirical_risk(ctx, model->value);
  });
}

lindml_status lindml_empirical_risk_factor(const lindml_dataset* data,
                                           lindml_noise_kind kind,
                                           double scale,
                                           const lindml_factor_model* model,
                                           double* out) {
  if (data == nullptr || model == nullptr || out == nullptr) {
    return fail_null("lindml_empirical_risk_factor");
  }
  return wrap([&] {
    lindml::RiskContext ctx{&data->value, to_noise(kind, scale)};
    *out = lindml::empirical_risk(ctx, model->value);
  });
}

/* ---------- solver ---------- */

void lindml_solver_config_default(lindml_solver_config* cfg) {
  if (cfg == nullptr) return;
  const lindml::SolverConfig def;
  cfg->learning_rate = def.learning_rate;
  cfg->decay = def.decay;
  cfg->max_iters = def.max_iters;
  cfg->rank_bound = def.rank_bound;
  cfg->init_scale = def.init_scale;
  cfg->seed = def.seed;
  cfg->batch_size = def.batch_size;
  cfg->stop_tol = def.stop_tol;
  cfg->history_stride = def.history_stride;
  cfg->decay_interval = def.decay_interval;
}

lindml_status lindml_fit(const lindml_dataset* data, lindml_noise_kind kind,
                         double scale, const lindml_solver_config* cfg,
                         lindml_fit_result** out) {
  if (data == nullptr || cfg == nullptr || out == nullptr) {
    return fail_null("lindml_fit");
  }
  return wrap([&] {
    *out = new lindml_fit_result{
        lindml::fit_factor(data->value, to_noise(kind, scale), to_config(cfg))};
  });
}

lindml_status lindml_fit_projected(const lindml_dataset* data,
                                   lindml_noise_kind kind, double scale,
                                   const lindml_solver_config* cfg,
                                   lindml_metric_model** out) {
  if (data == nullptr || cfg == nullptr || out == nullptr) {
    return fail_null("lindml_fit_projected");
  }
  return wrap([&] {
    *out = new lindml_metric_model{lindml::fit_projected(
        data->value, to_noise(kind, scale), to_config(cfg))};
  });
}

void lindml_fit_result_free(lindml_fit_result* fit) { delete fit; }

lindml_status lindml_fit_result_model(const lindml_fit_result* fit,
                                      lindml_factor_model** out) {
  if (fit == nullptr || out == nullptr) {
    return fail_null("lindml_fit_result_model");
  }
  return wrap([&] { *out = new lindml_factor_model{fit->value.model}; });
}

int lindml_fit_result_iterations(const lindml_fit_result* fit) {
  return fit == nullptr ? 0 : fit->value.iterations_run;
}

double lindml_fit_result_wall_time(const lindml_fit_result* fit) {
  return fit == nullptr ? 0.0 : fit->value.wall_time;
}

int lindml_fit_result_history_size(const lindml_fit_result* fit) {
  return fit == nullptr ? 0
                        : static_cast<int>(fit->value.loss_history.size());
}

lindml_status lindml_fit_result_history(const lindml_fit_result* fit,
                                        int* iterations, double* values) {
  if (fit == nullptr || iterations == nullptr || values == nullptr) {
    return fail_null("lindml_fit_result_history");
  }
  return wrap([&] {
    for (std::size_t i = 0; i < fit->value.loss_history.size(); ++i) {
      iterations[i] = fit->value.loss_history[i].first;
      values[i] = fit->value.loss_history[i].second;
    }
  });
}

/* ---------- evaluation ---------- */

lindml_status lindml_accuracy(const lindml_metric_model* model,
                              const lindml_dataset* data,
                              lindml_label_channel which, double* out) {
  if (model == nullptr || data == nullptr || out == nullptr) {
    return fail_null("lindml_accuracy");
  }
  return wrap([&] {
    *out = lindml::accuracy(model->value, data->value,
                            which == LINDML_LABELS_CLEAN
                                ? lindml::LabelChannel::kClean
                                : lindml::LabelChannel::kNoisy);
  });
}

namespace {

lindml_eval_report to_c_report(const lindml::EvalReport& report) {
  lindml_eval_report out{};
  out.train_acc_noisy = report.train_acc_noisy;
  out.train_acc_clean = report.train_acc_clean;
  out.test_acc_noisy = report.test_acc_noisy;
  out.test_acc_clean = report.test_acc_clean;
  out.has_clean = report.has_clean ? 1 : 0;
  out.rel_spectral = report.rel_spectral;
  out.rel_frobenius = report.rel_frobenius;
  out.has_star = report.has_star ? 1 : 0;
  out.loss_final = report.loss_final;
  out.realized_mislabel = report.realized_mislabel;
  out.iterations_run = report.iterations_run;
  out.wall_time = report.wall_time;
  return out;
}

}  // namespace

lindml_status lindml_evaluate(const lindml_fit_result* fit,
                              const lindml_dataset* train,
                              const lindml_dataset* test,
                              const lindml_metric_model* star,
                              lindml_eval_report* out) {
  if (fit == nullptr || train == nullptr || test == nullptr ||
      out == nullptr) {
    return fail_null("lindml_evaluate");
  }
  return wrap([&] {
    std::optional<lindml::MetricModel> star_model;
    if (star != nullptr) star_model = star->value;
    *out = to_c_report(lindml::eval_report(fit->value, train->value,
                                           test->value, star_model));
  });
}

namespace {

lindml::EvalReport from_c_report(const lindml_eval_report* report) {
  lindml::EvalReport full;
  full.train_acc_noisy = report->train_acc_noisy;
  full.train_acc_clean = report->train_acc_clean;
  full.test_acc_noisy = report->test_acc_noisy;
  full.test_acc_clean = report->test_acc_clean;
  full.has_clean = report->has_clean != 0;
  full.rel_spectral = report->rel_spectral;
  full.rel_frobenius = report->rel_frobenius;
  full.has_star = report->has_star != 0;
  full.loss_final = report->loss_final;
  full.realized_mislabel = report->realized_mislabel;
  full.iterations_run = report->iterations_run;
  full.wall_time = report->wall_time;
  full.eig_hat = lindml::Vector(0);
  full.eig_star = lindml::Vector(0);
  return full;
}

}  // namespace

lindml_status lindml_eval_report_save(const lindml_eval_report* report,
                                      const char* path) {
  if (report == nullptr || path == nullptr) {
    return fail_null("lindml_eval_report_save");
  }
  return wrap([&] { lindml::save_eval_report(from_c_report(report), path); });
}

lindml_status lindml_eval_report_save_full(const lindml_eval_report* report,
                                           const double* eig_hat,
                                           const double* eig_star,
                                           int spectra_len, const char* path) {
  if (report == nullptr || path == nullptr) {
    return fail_null("lindml_eval_report_save_full");
  }
  return wrap([&] {
    lindml::EvalReport full = from_c_report(report);
    if (eig_hat != nullptr) {
      full.eig_hat = Eigen::Map<const lindml::Vector>(eig_hat, spectra_len);
    }
    if (eig_star != nullptr) {
      full.eig_star = Eigen::Map<const lindml::Vector>(eig_star, spectra_len);
    }
    lindml::save_eval_report(full, path);
  });
}

lindml_status lindml_sample_complexity(double eps, double delta, int d,
                                       double zeta, double big_f,
                                       double big_b, double beta,
                                       double big_t, int* meta_ok,
                                       double* out) {
  if (out == nullptr) return fail_null("lindml_sample_complexity");
  return wrap([&] {
    bool ok = true;
    *out = lindml::sample_complexity(eps, delta, d, zeta, big_f, big_b, beta,
                                     big_t, &ok);
    if (meta_ok != nullptr) *meta_ok = ok ? 1 : 0;
  });
}

lindml_status lindml_log_cover_size(double alpha, int d, double big_b,
                                    double beta, double* out) {
  if (out == nullptr) return fail_null("lindml_log_cover_size");
  return wrap([&] { *out = lindml::log_cover_size(alpha, d, big_b, beta); });
}

lindml_status lindml_recovery_bound(double eps, int d, double c, double omega,
                                    double* log_value, double* value) {
  if (log_value == nullptr) return fail_null("lindml_recovery_bound");
  return wrap([&] {
    const auto bound = lindml::recovery_bound(eps, d, c, omega);
    *log_value = bound.log_value;
    if (value != nullptr) *value = bound.value;
  });
}

lindml_status lindml_eval_report_csv_header(char* buf, size_t size) {
  if (buf == nullptr) return fail_null("lindml_eval_report_csv_header");
  return wrap([&] {
    const std::string header = lindml::eval_report_csv_header();
    if (header.size() + 1 > size) {
      throw lindml::DomainError("csv header buffer too small");
    }
    std::memcpy(buf, header.c_str(), header.size() + 1);
  });
}

lindml_status lindml_eval_report_csv_row(const lindml_eval_report* report,
                                         char* buf, size_t size) {
  if (report == nullptr || buf == nullptr) {
    return fail_null("lindml_eval_report_csv_row");
  }
  return wrap([&] {
    lindml::EvalReport full;
    full.train_acc_noisy = report->train_acc_noisy;
    full.train_acc_clean = report->train_acc_clean;
    full.test_acc_noisy = report->test_acc_noisy;
    full.test_acc_clean = report->test_acc_clean;
    full.has_clean = report->has_clean != 0;
    full.rel_spectral = report->rel_spectral;
    full.rel_frobenius = report->rel_frobenius;
    full.has_star = report->has_star != 0;
    full.loss_final = report->loss_final;
    full.realized_mislabel = report->realized_mislabel;
    full.iterations_run = report->iterations_run;
    full.wall_time = report->wall_time;
    const std::string row = lindml::eval_report_csv_row(full);
    if (row.size() + 1 > size) {
      throw lindml::DomainError("csv row buffer too small");
    }
    std::memcpy(buf, row.c_str(), row.size() + 1);
  });
}

lindml_status lindml_dataset_normalize(const lindml_dataset* data,
                                       lindml_normalize_mode mode,
                                       lindml_dataset** out, double* u) {
  if (data == nullptr || out == nullptr) {
    return fail_null("lindml_dataset_normalize");
  }
  return wrap([&] {
    lindml::NormalizeMode m = lindml::NormalizeMode::kNone;
    if (mode == LINDML_NORMALIZE_STANDARDIZE) {
      m = lindml::NormalizeMode::kStandardize;
    } else if (mode == LINDML_NORMALIZE_WHITEN) {
      m = lindml::NormalizeMode::kWhiten;
    }
    const lindml::Matrix transform =
        lindml::normalize_transform(data->value, m);
    *out = new lindml_dataset{lindml::apply_transform(data->value, transform)};
    if (u != nullptr) copy_row_major(transform, u);
  });
}

lindml_status lindml_back_transform(const lindml_metric_model* model,
                                    const double* u,
                                    lindml_metric_model** out) {
  if (model == nullptr || u == nullptr || out == nullptr) {
    return fail_null("lindml_back_transform");
  }
  return wrap([&] {
    const int d = model->value.dim();
    *out = new lindml_metric_model{
        lindml::back_transform(model->value, row_major_matrix(u, d, d))};
  });
}

lindml_status lindml_back_transform_factor(const lindml_factor_model* model,
                                           const double* u,
                                           lindml_factor_model** out) {
  if (model == nullptr || u == nullptr || out == nullptr) {
    return fail_null("lindml_back_transform_factor");
  }
  return wrap([&] {
    const int d = model->value.dim();
    *out = new lindml_factor_model{
        lindml::back_transform(model->value, row_major_matrix(u, d, d))};
  });
}

lindml_status lindml_fit_result_save(const lindml_fit_result* fit,
                                     uint64_t seed, const char* noise_kind,
                                     const char* created,
                                     const char* model_path_or_null,
                                     const char* history_path_or_null) {
  if (fit == nullptr ||
      (model_path_or_null == nullptr && history_path_or_null == nullptr)) {
    return fail_null("lindml_fit_result_save");
  }
  return wrap([&] {
    if (model_path_or_null != nullptr) {
      lindml::ModelMetadata meta;
      meta.seed = seed;
      meta.noise_kind = noise_kind == nullptr ? "" : noise_kind;
      meta.created = created == nullptr ? "" : created;
      lindml::save_model(lindml::factor_to_metric(fit->value.model), meta,
                         model_path_or_null, fit->value.model);
    }
    if (history_path_or_null != nullptr) {
      lindml::save_loss_history(fit->value.loss_history, history_path_or_null);
    }
  });
}

} /* extern "C" */

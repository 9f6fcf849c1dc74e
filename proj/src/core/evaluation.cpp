#include "core/evaluation.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/metric.hpp"
#include "core/risk.hpp"

namespace lindml {

namespace {

template <typename Model>
double accuracy_impl(const Model& model, const Dataset& data,
                     LabelChannel which) {
  if (data.dim != model.dim()) {
    throw DimensionError("accuracy: dataset and model dimensions differ");
  }
  if (which == LabelChannel::kClean && !data.clean_labels) {
    throw DomainError("accuracy: dataset has no clean label channel");
  }
  if (data.num_pairs() == 0) {
    throw DomainError("accuracy: dataset must be nonempty");
  }
  const IntVector& labels =
      which == LabelChannel::kClean ? *data.clean_labels : data.labels;
  int hits = 0;
  Vector z(data.dim);
  for (int i = 0; i < data.num_pairs(); ++i) {
    z = data.z.row(i).transpose();
    hits += predict(model, z) == labels[i];
  }
  return static_cast<double>(hits) / data.num_pairs();
}

}  // namespace

double accuracy(const MetricModel& model, const Dataset& data,
                LabelChannel which) {
  return accuracy_impl(model, data, which);
}

double accuracy(const FactorModel& model, const Dataset& data,
                LabelChannel which) {
  return accuracy_impl(model, data, which);
}

EvalReport eval_report(const FitResult& fit, const Dataset& train,
                       const Dataset& test,
                       const std::optional<MetricModel>& star) {
  EvalReport report;
  report.train_acc_noisy = accuracy(fit.model, train, LabelChannel::kNoisy);
  report.test_acc_noisy = accuracy(fit.model, test, LabelChannel::kNoisy);
  report.has_clean = train.clean_labels.has_value() &&
                     test.clean_labels.has_value();
  if (report.has_clean) {
    report.train_acc_clean = accuracy(fit.model, train, LabelChannel::kClean);
    report.test_acc_clean = accuracy(fit.model, test, LabelChannel::kClean);
    int mismatches = 0;
    for (int i = 0; i < train.num_pairs(); ++i) {
      mismatches += train.labels[i] != (*train.clean_labels)[i];
    }
    report.realized_mislabel =
        train.num_pairs() > 0
            ? static_cast<double>(mismatches) / train.num_pairs()
            : 0.0;
  }

  const MetricModel hat = factor_to_metric(fit.model);
  if (star) {
    report.has_star = true;
    const RelativeErrors err = relative_errors(hat, *star);
    report.rel_spectral = err.spectral;
    report.rel_frobenius = err.frobenius;
    report.eig_star = sym_eigendecomp(star->m / star->tau).eigenvalues;
  }
  if (hat.tau > 0.0) {
    report.eig_hat = sym_eigendecomp(hat.m / hat.tau).eigenvalues;
  } else {
    report.eig_hat = sym_eigendecomp(hat.m).eigenvalues;
  }
  report.loss_final =
      fit.loss_history.empty() ? 0.0 : fit.loss_history.back().second;
  report.iterations_run = fit.iterations_run;
  report.wall_time = fit.wall_time;
  return report;
}

double sample_complexity(double eps, double delta, int d, double zeta,
                         double big_f, double big_b, double beta, double big_t,
                         bool* meta_ok) {
  if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0)) {
    throw DomainError("sample_complexity: eps and delta must lie in (0, 1)");
  }
  if (d < 1 || !(zeta > 0.0) || !(big_f > 0.0) || !(big_b > 0.0) ||
      !(beta > 0.0) || !(big_t > 0.0)) {
    throw DomainError("sample_complexity: all arguments must be positive");
  }
  if (meta_ok != nullptr) {
    *meta_ok = big_b <= beta * big_f;
  }
  const double dd = static_cast<double>(d);
  const double lead =
      9.0 * zeta * (big_f + 1.0) * (big_f + 1.0) * big_t * big_t /
      (2.0 * eps * eps);
  const double bracket =
      std::log(6.0 * zeta * (1.0 + big_f) * big_b / (eps * delta)) +
      dd * dd * std::log(12.0 * zeta * (1.0 + big_f) * beta / eps) +
      1.5 * dd * dd * std::log(dd);
  return lead * bracket;
}

double log_cover_size(double alpha, int d, double big_b, double beta) {
  if (!(alpha > 0.0)) {
    throw DomainError("log_cover_size: alpha must be positive");
  }
  if (d < 1 || !(big_b > 0.0) || !(beta > 0.0)) {
    throw DomainError("log_cover_size: all arguments must be positive");
  }
  const double dd = static_cast<double>(d);
  return std::log(big_b / alpha) +
         dd * dd * std::log(4.0 * beta * dd * std::sqrt(dd) / alpha);
}

RecoveryBound recovery_bound(double eps, int d, double c, double omega) {
  if (!(eps > 0.0) || d < 1 || !(c > 0.0) || !(omega > 0.0)) {
    throw DomainError("recovery_bound: all arguments must be positive");
  }
  const double dd = static_cast<double>(d);
  const double log_cd =
      std::log(c) + 0.5 * dd * std::log(M_PI) - std::lgamma(0.5 * dd + 1.0);
  RecoveryBound out;
  out.log_value = 2.0 * std::log(omega) + 2.0 * log_cd - std::log(800.0) -
                  2.0 * dd * std::log(18.0) + 2.0 * std::log(eps);
  out.value = std::exp(out.log_value);
  return out;
}

}  // namespace lindml

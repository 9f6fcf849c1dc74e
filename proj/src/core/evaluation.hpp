#pragma once

#include <optional>

#include "core/solver.hpp"
#include "core/types.hpp"

namespace lindml {

enum class LabelChannel { kNoisy, kClean };

// Fraction of pairs whose prediction matches the chosen label channel.
double accuracy(const MetricModel& model, const Dataset& data,
                LabelChannel which);
double accuracy(const FactorModel& model, const Dataset& data,
                LabelChannel which);

struct EvalReport {
  double train_acc_noisy = 0.0;
  double train_acc_clean = 0.0;
  double test_acc_noisy = 0.0;
  double test_acc_clean = 0.0;
  bool has_clean = false;
  double rel_spectral = 0.0;
  double rel_frobenius = 0.0;
  bool has_star = false;
  Vector eig_hat;   // spectrum of M_hat / tau_hat, descending
  Vector eig_star;  // spectrum of M_star / tau_star, descending
  double loss_final = 0.0;
  double realized_mislabel = 0.0;
  int iterations_run = 0;
  double wall_time = 0.0;
};

EvalReport eval_report(const FitResult& fit, const Dataset& train,
                       const Dataset& test,
                       const std::optional<MetricModel>& star);

// Uniform-convergence sample count:
//   (9 zeta (F+1)^2 T^2 / 2 eps^2) * [ log(6 zeta (1+F) B / (eps delta))
//       + d^2 log(12 zeta (1+F) beta / eps) + (3/2) d^2 log d ].
// Callers take the ceiling. Sets *meta_ok to whether B <= beta * F (a
// modeling sanity check, not a precondition).
double sample_complexity(double eps, double delta, int d, double zeta,
                         double big_f, double big_b, double beta, double big_t,
                         bool* meta_ok = nullptr);

// log of the covering number of the model class at radius alpha:
//   log(B/alpha) + d^2 log(4 beta d sqrt(d) / alpha).
double log_cover_size(double alpha, int d, double big_b, double beta);

// Population-risk gap that forces the fitted model within eps of the truth
// in d(.,.) when the data density is at least c on the unit ball:
//   (omega^2 C(d)^2 / (800 * 18^(2d))) * eps^2,  C(d) = c pi^(d/2) / Gamma(d/2+1).
// Returned in natural-log space; `value` is exp(log_value) and may underflow.
struct RecoveryBound {
  double log_value;
  double value;
};
RecoveryBound recovery_bound(double eps, int d, double c, double omega);

}  // namespace lindml

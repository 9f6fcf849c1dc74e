#pragma once

#include <vector>

#include "core/noise.hpp"
#include "core/types.hpp"

namespace lindml {

// Pairs the observations with the loss's assumed noise family.
struct RiskContext {
  const Dataset* data = nullptr;
  NoiseSpec noise;
};

// R_N: mean of -log CDF(label * (||z||_M^2 - tau)) over the dataset.
// Accumulation runs over fixed-size blocks in index order with compensated
// sums, so the value is independent of any parallel schedule.
double empirical_risk(const RiskContext& ctx, const MetricModel& model);
double empirical_risk(const RiskContext& ctx, const FactorModel& model);

// Analytic gradient of R_N in the factor parameterization. With
// a_i = l_i (||A^T z_i||^2 - tau) and w_i = d/da[-log CDF](a_i):
//   grad_factor = (2/N) sum_i w_i l_i z_i (z_i^T A)
//   grad_tau    = -(1/N) sum_i w_i l_i
struct FactorGradient {
  Matrix factor;
  double tau;
};
FactorGradient risk_gradient(const RiskContext& ctx, const FactorModel& f);

// Loss and gradient in one pass over the data (what the solver iterates).
double risk_value_and_gradient(const RiskContext& ctx, const FactorModel& f,
                               FactorGradient* grad);

// Gradient of R_N with respect to the metric matrix itself:
//   grad_m = (1/N) sum_i w_i l_i z_i z_i^T,  grad_tau as above.
struct MetricGradient {
  Matrix m;
  double tau;
};
double risk_value_and_gradient_metric(const RiskContext& ctx,
                                      const MetricModel& model,
                                      MetricGradient* grad);

// Monte Carlo estimate of the population risk of `model` when labels are
// generated by `star` under `noise`: each sample point contributes both
// labels weighted by their generation probabilities.
double true_risk_mc(const MetricModel& model, const MetricModel& star,
                    const NoiseSpec& noise, const std::vector<Vector>& zs);

// Midpoint convexity defect of R_N over the (M, tau) cone:
//   R_N(lambda a + (1-lambda) b) - [lambda R_N(a) + (1-lambda) R_N(b)].
// Nonpositive (up to rounding) for every valid input.
double convexity_probe(const RiskContext& ctx, const MetricModel& a,
                       const MetricModel& b, double lambda);

}  // namespace lindml

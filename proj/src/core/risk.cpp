#include "core/risk.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/metric.hpp"

namespace lindml {

namespace {

// Fixed accumulation block: sums run over blocks in index order with
// compensated addition, so results do not depend on how work is scheduled.
constexpr int kBlock = 8192;

constexpr double kLogTwo = 0.6931471805599453094;
constexpr double kLogTwoOverPi = -0.4515827052894548647;
constexpr double kLogSqrt2Pi = 0.9189385332046727418;
constexpr double kHalfPi = 1.5707963267948966192;

struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

double log_norm_cdf_local(double a) {
  if (a >= 0.0) return std::log1p(-0.5 * std::erfc(a * M_SQRT1_2));
  if (a >= -30.0) return std::log(0.5 * std::erfc(-a * M_SQRT1_2));
  const double r2 = 1.0 / (a * a);
  const double series =
      1.0 - r2 * (1.0 - 3.0 * r2 * (1.0 - 5.0 * r2 * (1.0 - 7.0 * r2 *
                  (1.0 - 9.0 * r2 * (1.0 - 11.0 * r2)))));
  return -0.5 * a * a - kLogSqrt2Pi - std::log(-a) + std::log(series);
}

// Loss term -log CDF(a) and its derivative in one evaluation; the two share
// the same exponential for the closed-form families.
void loss_and_weight(const NoiseSpec& noise, double a, double* loss,
                     double* weight) {
  const double x = a / noise.scale;
  double l = 0.0;
  double w = 0.0;
  switch (noise.kind) {
    case NoiseKind::kLogistic: {
      if (x >= 0.0) {
        const double e = std::exp(-x);
        l = std::log1p(e);
        w = -e / (1.0 + e);
      } else {
        const double e = std::exp(x);
        l = -x + std::log1p(e);
        w = -1.0 / (1.0 + e);
      }
      break;
    }
    case NoiseKind::kLaplace: {
      if (x <= 0.0) {
        l = -x + kLogTwo;
        w = -1.0;
      } else {
        const double e = std::exp(-x);
        l = -std::log1p(-0.5 * e);
        w = -e / (2.0 - e);
      }
      break;
    }
    case NoiseKind::kHyperbolicSecant: {
      if (x <= 0.0) {
        const double u = x < -400.0 ? 0.0 : std::exp(kHalfPi * x);
        if (u > 0.0) {
          const double at = std::atan(u);
          l = -(kLogTwoOverPi + std::log(at));
          w = -kHalfPi * u / ((1.0 + u * u) * at);
        } else {
          l = -(kLogTwoOverPi + kHalfPi * x);
          w = -kHalfPi;
        }
      } else {
        const double v = std::exp(-kHalfPi * x);
        const double t = (2.0 / M_PI) * std::atan(v);
        l = -std::log1p(-t);
        w = -v / ((1.0 + v * v) * (1.0 - t));
      }
      break;
    }
    case NoiseKind::kNormal: {
      l = -log_norm_cdf_local(x);
      w = -std::exp(-0.5 * x * x - kLogSqrt2Pi + l);
      break;
    }
  }
  *loss = l;
  *weight = w / noise.scale;
}

void check_context(const RiskContext& ctx, int model_dim, const char* op) {
  if (ctx.data == nullptr || ctx.data->num_pairs() == 0) {
    throw DomainError(std::string(op) + ": dataset must be nonempty");
  }
  validate(ctx.noise);
  if (ctx.data->dim != model_dim) {
    throw DimensionError(std::string(op) + ": dataset dimension " +
                         std::to_string(ctx.data->dim) +
                         " does not match model dimension " +
                         std::to_string(model_dim));
  }
}

// Shared driver: computes margins block by block through `margins_of`,
// accumulates the loss and, when requested, per-sample weights.
template <typename MarginFn, typename BlockFn>
double accumulate_risk(const Dataset& data, const NoiseSpec& noise,
                       MarginFn&& margins_of, BlockFn&& on_block) {
  const int n = data.num_pairs();
  Kahan loss_acc;
  Vector margins;
  Vector coeff;
  for (int start = 0; start < n; start += kBlock) {
    const int len = std::min(kBlock, n - start);
    margins_of(start, len, &margins);
    coeff.resize(len);
    Kahan block_loss;
    for (int i = 0; i < len; ++i) {
      const int label = data.labels[start + i];
      const double a = label * margins[i];
      double l, w;
      loss_and_weight(noise, a, &l, &w);
      block_loss.add(l);
      coeff[i] = w * label;
    }
    loss_acc.add(block_loss.sum);
    on_block(start, len, coeff);
  }
  return loss_acc.sum / static_cast<double>(n);
}

}  // namespace

double empirical_risk(const RiskContext& ctx, const MetricModel& model) {
  check_context(ctx, model.dim(), "empirical_risk");
  const Dataset& data = *ctx.data;
  auto margins_of = [&](int start, int len, Vector* out) {
    const auto zb = data.z.middleRows(start, len);
    *out = ((zb * model.m).cwiseProduct(zb)).rowwise().sum();
    out->array() -= model.tau;
  };
  return accumulate_risk(data, ctx.noise, margins_of,
                         [](int, int, const Vector&) {});
}

double empirical_risk(const RiskContext& ctx, const FactorModel& model) {
  check_context(ctx, model.dim(), "empirical_risk");
  const Dataset& data = *ctx.data;
  auto margins_of = [&](int start, int len, Vector* out) {
    const auto zb = data.z.middleRows(start, len);
    *out = (zb * model.factor).rowwise().squaredNorm();
    out->array() -= model.tau;
  };
  return accumulate_risk(data, ctx.noise, margins_of,
                         [](int, int, const Vector&) {});
}

double risk_value_and_gradient(const RiskContext& ctx, const FactorModel& f,
                               FactorGradient* grad) {
  check_context(ctx, f.dim(), "risk_gradient");
  const Dataset& data = *ctx.data;
  const int n = data.num_pairs();
  const int k = f.rank_bound();

  grad->factor = Matrix::Zero(f.dim(), k);
  Kahan tau_acc;
  Matrix v;
  auto margins_of = [&](int start, int len, Vector* out) {
    const auto zb = data.z.middleRows(start, len);
    v.noalias() = zb * f.factor;  // len x k
    *out = v.rowwise().squaredNorm();
    out->array() -= f.tau;
  };
  auto on_block = [&](int start, int len, const Vector& coeff) {
    const auto zb = data.z.middleRows(start, len);
    grad->factor.noalias() += zb.transpose() * coeff.asDiagonal() * v;
    Kahan block_tau;
    for (int i = 0; i < len; ++i) block_tau.add(coeff[i]);
    tau_acc.add(block_tau.sum);
  };
  const double risk = accumulate_risk(data, ctx.noise, margins_of, on_block);
  grad->factor *= 2.0 / static_cast<double>(n);
  grad->tau = -tau_acc.sum / static_cast<double>(n);
  return risk;
}

FactorGradient risk_gradient(const RiskContext& ctx, const FactorModel& f) {
  FactorGradient grad;
  risk_value_and_gradient(ctx, f, &grad);
  return grad;
}

double risk_value_and_gradient_metric(const RiskContext& ctx,
                                      const MetricModel& model,
                                      MetricGradient* grad) {
  check_context(ctx, model.dim(), "risk_gradient");
  const Dataset& data = *ctx.data;
  const int n = data.num_pairs();

  grad->m = Matrix::Zero(model.dim(), model.dim());
  Kahan tau_acc;
  auto margins_of = [&](int start, int len, Vector* out) {
    const auto zb = data.z.middleRows(start, len);
    *out = ((zb * model.m).cwiseProduct(zb)).rowwise().sum();
    out->array() -= model.tau;
  };
  auto on_block = [&](int start, int len, const Vector& coeff) {
    const auto zb = data.z.middleRows(start, len);
    grad->m.noalias() += zb.transpose() * coeff.asDiagonal() * zb;
    Kahan block_tau;
    for (int i = 0; i < len; ++i) block_tau.add(coeff[i]);
    tau_acc.add(block_tau.sum);
  };
  const double risk = accumulate_risk(data, ctx.noise, margins_of, on_block);
  grad->m *= 1.0 / static_cast<double>(n);
  grad->m = 0.5 * (grad->m + grad->m.transpose()).eval();
  grad->tau = -tau_acc.sum / static_cast<double>(n);
  return risk;
}

double true_risk_mc(const MetricModel& model, const MetricModel& star,
                    const NoiseSpec& noise, const std::vector<Vector>& zs) {
  if (model.dim() != star.dim()) {
    throw DimensionError("true_risk_mc: model dimensions differ");
  }
  if (zs.empty()) {
    throw DomainError("true_risk_mc: sample must be nonempty");
  }
  validate(noise);
  Kahan acc;
  for (const Vector& z : zs) {
    const double margin_star = mahalanobis_sq(star, z) - star.tau;
    const double margin = mahalanobis_sq(model, z) - model.tau;
    const double p_far = cdf(noise, margin_star);
    const double p_close = cdf(noise, -margin_star);
    acc.add(-p_far * log_cdf(noise, margin) - p_close * log_cdf(noise, -margin));
  }
  return acc.sum / static_cast<double>(zs.size());
}

double convexity_probe(const RiskContext& ctx, const MetricModel& a,
                       const MetricModel& b, double lambda) {
  if (a.dim() != b.dim()) {
    throw DimensionError("convexity_probe: model dimensions differ");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("convexity_probe: lambda must lie in [0, 1]");
  }
  MetricModel interp;
  interp.m = lambda * a.m + (1.0 - lambda) * b.m;
  interp.tau = lambda * a.tau + (1.0 - lambda) * b.tau;
  const double mixed = empirical_risk(ctx, interp);
  const double ends =
      lambda * empirical_risk(ctx, a) + (1.0 - lambda) * empirical_risk(ctx, b);
  return mixed - ends;
}

}  // namespace lindml

#include "core/noise.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace lindml {

namespace {

constexpr double kLogHalf = -0.6931471805599453094;
constexpr double kLogTwoOverPi = -0.4515827052894548647;
constexpr double kLogSqrt2Pi = 0.9189385332046727418;
constexpr double kHalfPi = 1.5707963267948966192;
constexpr double kTiniest = std::numeric_limits<double>::denorm_min();

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double t = std::exp(x);
  return t / (1.0 + t);
}

double log_norm_pdf(double a) { return -0.5 * a * a - kLogSqrt2Pi; }

// log Phi for the standard normal. Direct erfc evaluation until the erfc
// argument nears its underflow threshold, then the continued asymptotic
// expansion Phi(a) = phi(a)/(-a) * (1 - 1/a^2 + 3/a^4 - ...).
double log_norm_cdf(double a) {
  if (a >= 0.0) {
    return std::log1p(-0.5 * std::erfc(a * M_SQRT1_2));
  }
  if (a >= -30.0) {
    return std::log(0.5 * std::erfc(-a * M_SQRT1_2));
  }
  const double r2 = 1.0 / (a * a);
  const double series =
      1.0 - r2 * (1.0 - 3.0 * r2 * (1.0 - 5.0 * r2 * (1.0 - 7.0 * r2 *
                  (1.0 - 9.0 * r2 * (1.0 - 11.0 * r2)))));
  return log_norm_pdf(a) - std::log(-a) + std::log(series);
}

double norm_cdf(double a) {
  return a >= -37.0 ? 0.5 * std::erfc(-a * M_SQRT1_2)
                    : std::exp(log_norm_cdf(a));
}

double log_laplace_cdf(double a) {
  return a <= 0.0 ? a + kLogHalf : std::log1p(-0.5 * std::exp(-a));
}

double log_hs_cdf(double a) {
  if (a > 0.0) {
    return std::log1p(-(2.0 / M_PI) * std::atan(std::exp(-kHalfPi * a)));
  }
  if (a < -400.0) {
    return kLogTwoOverPi + kHalfPi * a;
  }
  return kLogTwoOverPi + std::log(std::atan(std::exp(kHalfPi * a)));
}

double hs_pdf(double a) {
  const double e = std::exp(-kHalfPi * std::fabs(a));
  return e / (1.0 + e * e);
}

void require_finite(double a, const char* op) {
  if (!std::isfinite(a)) {
    throw DomainError(std::string(op) + ": argument must be finite");
  }
}

}  // namespace

const char* noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kLogistic: return "logistic";
    case NoiseKind::kNormal: return "normal";
    case NoiseKind::kLaplace: return "laplace";
    case NoiseKind::kHyperbolicSecant: return "hs";
  }
  return "?";
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "logistic") return NoiseKind::kLogistic;
  if (name == "normal" || name == "gaussian") return NoiseKind::kNormal;
  if (name == "laplace") return NoiseKind::kLaplace;
  if (name == "hs" || name == "hyperbolic_secant") {
    return NoiseKind::kHyperbolicSecant;
  }
  throw DomainError("unknown noise kind: " + name);
}

void validate(const NoiseSpec& noise) {
  if (!(noise.scale > 0.0) || !std::isfinite(noise.scale)) {
    throw DomainError("noise scale must be a positive finite real");
  }
}

double log_cdf(const NoiseSpec& noise, double a) {
  validate(noise);
  require_finite(a, "log_cdf");
  const double x = a / noise.scale;
  switch (noise.kind) {
    case NoiseKind::kLogistic: return -softplus(-x);
    case NoiseKind::kNormal: return log_norm_cdf(x);
    case NoiseKind::kLaplace: return log_laplace_cdf(x);
    case NoiseKind::kHyperbolicSecant: return log_hs_cdf(x);
  }
  return 0.0;
}

double cdf(const NoiseSpec& noise, double a) {
  validate(noise);
  require_finite(a, "cdf");
  const double x = a / noise.scale;
  switch (noise.kind) {
    case NoiseKind::kLogistic: return sigmoid(x);
    case NoiseKind::kNormal: return norm_cdf(x);
    case NoiseKind::kLaplace:
      return x <= 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
    case NoiseKind::kHyperbolicSecant:
      return x > 0.0 ? 1.0 - (2.0 / M_PI) * std::atan(std::exp(-kHalfPi * x))
                     : (2.0 / M_PI) * std::atan(std::exp(kHalfPi * x));
  }
  return 0.0;
}

double pdf(const NoiseSpec& noise, double a) {
  validate(noise);
  require_finite(a, "pdf");
  const double x = a / noise.scale;
  double p = 0.0;
  switch (noise.kind) {
    case NoiseKind::kLogistic: {
      const double e = std::exp(-std::fabs(x));
      p = e / ((1.0 + e) * (1.0 + e));
      break;
    }
    case NoiseKind::kNormal:
      p = std::exp(log_norm_pdf(x));
      break;
    case NoiseKind::kLaplace:
      p = 0.5 * std::exp(-std::fabs(x));
      break;
    case NoiseKind::kHyperbolicSecant:
      p = hs_pdf(x);
      break;
  }
  return p / noise.scale;
}

double neg_log_cdf_deriv(const NoiseSpec& noise, double a) {
  validate(noise);
  require_finite(a, "neg_log_cdf_deriv");
  const double x = a / noise.scale;
  double d = 0.0;
  switch (noise.kind) {
    case NoiseKind::kLogistic:
      d = -sigmoid(-x);
      break;
    case NoiseKind::kNormal:
      d = -std::exp(log_norm_pdf(x) - log_norm_cdf(x));
      break;
    case NoiseKind::kLaplace:
      if (x <= 0.0) {
        d = -1.0;
      } else {
        const double denom = 2.0 * std::exp(x) - 1.0;
        d = std::isinf(denom) ? 0.0 : -1.0 / denom;
      }
      break;
    case NoiseKind::kHyperbolicSecant:
      if (x <= 0.0) {
        const double u = std::exp(kHalfPi * x);
        d = u > 0.0 ? -kHalfPi * u / ((1.0 + u * u) * std::atan(u)) : -kHalfPi;
      } else {
        d = -hs_pdf(x) / std::exp(log_hs_cdf(x));
      }
      break;
  }
  d /= noise.scale;
  // The derivative is strictly negative; keep it so even past the point
  // where the exact magnitude underflows.
  return d < 0.0 ? d : -kTiniest;
}

double quantile(const NoiseSpec& noise, double u) {
  validate(noise);
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("quantile: u must lie in (0, 1)");
  }
  double q = 0.0;
  switch (noise.kind) {
    case NoiseKind::kLogistic:
      q = std::log(u) - std::log1p(-u);
      break;
    case NoiseKind::kNormal:
      q = norm_quantile(u);
      break;
    case NoiseKind::kLaplace:
      q = u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
      break;
    case NoiseKind::kHyperbolicSecant:
      q = (2.0 / M_PI) * std::log(std::tan(kHalfPi * u));
      break;
  }
  return q * noise.scale;
}

std::vector<double> sample(const NoiseSpec& noise, Rng& rng, std::size_t n) {
  validate(noise);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = quantile(noise, rng.u01());
  }
  return out;
}

NoiseConstants constants(const NoiseSpec& noise, double beta_f) {
  validate(noise);
  if (!(beta_f > 0.0) || !std::isfinite(beta_f)) {
    throw DomainError("constants: beta_f must be a positive finite real");
  }
  NoiseConstants out{};
  const double b = beta_f / noise.scale;
  switch (noise.kind) {
    case NoiseKind::kLogistic:
    case NoiseKind::kLaplace:
      out.zeta = 1.0 / noise.scale;
      break;
    case NoiseKind::kHyperbolicSecant:
      out.zeta = kHalfPi / noise.scale;
      break;
    case NoiseKind::kNormal:
      // Exact endpoint ratio pdf(-b)/Phi(-b): the Lipschitz bound of
      // -log Phi on the interval.
      out.zeta = std::exp(log_norm_pdf(b) - log_norm_cdf(-b)) / noise.scale;
      break;
  }
  out.big_t = -log_cdf(noise, -beta_f);
  out.omega = pdf(noise, beta_f);
  return out;
}

}  // namespace lindml

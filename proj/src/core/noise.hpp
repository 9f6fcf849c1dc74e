#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace lindml {

enum class NoiseKind { kLogistic, kNormal, kLaplace, kHyperbolicSecant };

const char* noise_kind_name(NoiseKind kind);
NoiseKind noise_kind_from_name(const std::string& name);

// A symmetric zero-mean noise family with a positive scale parameter.
// All evaluation routines apply the scale as F(a/s) (densities as f(a/s)/s).
struct NoiseSpec {
  NoiseKind kind = NoiseKind::kLogistic;
  double scale = 1.0;
};

void validate(const NoiseSpec& noise);

// log of the CDF, finite for every finite argument. The tails are computed
// with asymptotic/complement formulations so that nothing underflows to
// -inf before |a/s| is astronomically large.
double log_cdf(const NoiseSpec& noise, double a);

double cdf(const NoiseSpec& noise, double a);

double pdf(const NoiseSpec& noise, double a);

// d/da [ -log CDF(a) ]; always negative, increasing in a.
double neg_log_cdf_deriv(const NoiseSpec& noise, double a);

// Inverse CDF. u must lie in (0, 1).
double quantile(const NoiseSpec& noise, double u);

// n i.i.d. draws by inverse transform; deterministic given the stream.
std::vector<double> sample(const NoiseSpec& noise, Rng& rng, std::size_t n);

// Analytic constants of the family on the interval [-beta_f, beta_f]:
//   zeta:  Lipschitz bound of -log CDF (exact tail ratio for the normal
//          family, closed-form constants for the others),
//   big_t: -log CDF(-beta_f), the maximum loss value on the interval,
//   omega: the density minimum on the interval, attained at the endpoint.
struct NoiseConstants {
  double zeta;
  double big_t;
  double omega;
};

NoiseConstants constants(const NoiseSpec& noise, double beta_f);

}  // namespace lindml

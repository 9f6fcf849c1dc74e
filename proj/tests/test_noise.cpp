#include <doctest.h>

#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/noise.hpp"
#include "core/rng.hpp"
#include "oracles/reference_values.hpp"
#include "testutil.hpp"

using namespace lindml;
using testutil::close_rel;

namespace {

const NoiseKind kAllKinds[] = {NoiseKind::kLogistic, NoiseKind::kNormal,
                               NoiseKind::kLaplace,
                               NoiseKind::kHyperbolicSecant};

NoiseSpec spec(NoiseKind kind, double scale = 1.0) { return {kind, scale}; }

}  // namespace

TEST_CASE("log_cdf closed-form values") {
  CHECK(log_cdf(spec(NoiseKind::kLogistic), 0.0) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(log_cdf(spec(NoiseKind::kHyperbolicSecant), 0.0) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(log_cdf(spec(NoiseKind::kLaplace), 1.0) ==
        doctest::Approx(refvals::kLaplaceLogCdf1).epsilon(1e-14));
  CHECK(log_cdf(spec(NoiseKind::kLaplace), -2.0) ==
        doctest::Approx(-2.0 - std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("log_cdf matches the high-precision spot values") {
  for (std::size_t i = 0; i < std::size(refvals::kSpotA); ++i) {
    const NoiseKind kind = kAllKinds[refvals::kSpotKind[i]];
    CAPTURE(i);
    CHECK(close_rel(log_cdf(spec(kind), refvals::kSpotA[i]),
                    refvals::kSpotLogCdf[i], 1e-13));
    CHECK(close_rel(neg_log_cdf_deriv(spec(kind), refvals::kSpotA[i]),
                    refvals::kSpotNegLogCdfDeriv[i], 1e-12));
  }
}

TEST_CASE("normal log_cdf deep-tail accuracy") {
  for (std::size_t i = 0; i < std::size(refvals::kNormalTailA); ++i) {
    CAPTURE(refvals::kNormalTailA[i]);
    CHECK(close_rel(log_cdf(spec(NoiseKind::kNormal), refvals::kNormalTailA[i]),
                    refvals::kNormalTailLogCdf[i], 1e-10));
  }
  CHECK(close_rel(log_cdf(spec(NoiseKind::kNormal), -10.0),
                  refvals::kNormalTailLogCdf[1], 1e-10));
}

TEST_CASE("hyperbolic-secant log_cdf across its range") {
  for (std::size_t i = 0; i < std::size(refvals::kHsA); ++i) {
    CAPTURE(refvals::kHsA[i]);
    CHECK(close_rel(log_cdf(spec(NoiseKind::kHyperbolicSecant),
                            refvals::kHsA[i]),
                    refvals::kHsLogCdf[i], 1e-12));
  }
}

TEST_CASE("logistic log_cdf asymptote at very negative arguments") {
  const double v = log_cdf(spec(NoiseKind::kLogistic), -700.0);
  CHECK(std::isfinite(v));
  CHECK(std::fabs(v - (-700.0)) < 1e-6);
}

TEST_CASE("complement identity exp(logF(a)) + exp(logF(-a)) = 1") {
  for (NoiseKind kind : kAllKinds) {
    for (double a = -30.0; a <= 30.0 + 1e-9; a += 0.01) {
      const double sum = std::exp(log_cdf(spec(kind), a)) +
                         std::exp(log_cdf(spec(kind), -a));
      if (std::fabs(sum - 1.0) > 1e-9) {
        CAPTURE(noise_kind_name(kind));
        CAPTURE(a);
        REQUIRE(std::fabs(sum - 1.0) <= 1e-9);
      }
    }
    CHECK(cdf(spec(kind), 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("pdf values, symmetry, and total mass") {
  CHECK(pdf(spec(NoiseKind::kLogistic), 0.0) == doctest::Approx(0.25));
  CHECK(pdf(spec(NoiseKind::kLaplace), 0.0) == doctest::Approx(0.5));
  CHECK(pdf(spec(NoiseKind::kHyperbolicSecant), 0.0) == doctest::Approx(0.5));
  CHECK(pdf(spec(NoiseKind::kNormal), 0.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)));

  for (NoiseKind kind : kAllKinds) {
    for (double a = 0.0; a <= 20.0; a += 0.37) {
      CHECK(pdf(spec(kind), a) == doctest::Approx(pdf(spec(kind), -a)));
      CHECK(pdf(spec(kind), a) >= 0.0);
    }
    // Equispaced sum; the Laplace kink at zero limits accuracy to O(h^2).
    const double h = 0.01;
    double mass = 0.0;
    for (double a = -60.0; a <= 60.0; a += h) mass += pdf(spec(kind), a) * h;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("neg_log_cdf_deriv closed-form values") {
  CHECK(neg_log_cdf_deriv(spec(NoiseKind::kLogistic), 0.0) ==
        doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(neg_log_cdf_deriv(spec(NoiseKind::kLaplace), -3.0) ==
        doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(close_rel(neg_log_cdf_deriv(spec(NoiseKind::kNormal), 2.0),
                  refvals::kNormalNegLogCdfDeriv2, 1e-12));
  CHECK(close_rel(neg_log_cdf_deriv(spec(NoiseKind::kNormal), -5.0),
                  refvals::kNormalNegLogCdfDerivM5, 1e-12));
  CHECK(close_rel(neg_log_cdf_deriv(spec(NoiseKind::kNormal), -40.0),
                  refvals::kNormalNegLogCdfDerivM40, 1e-12));
}

TEST_CASE("neg_log_cdf_deriv matches central finite differences") {
  const double h = 1e-6;
  for (NoiseKind kind : kAllKinds) {
    for (double a = -20.0; a <= 20.0 + 1e-9; a += 0.25) {
      const double fd =
          (log_cdf(spec(kind), a + h) - log_cdf(spec(kind), a - h)) / (2 * h);
      const double analytic = -neg_log_cdf_deriv(spec(kind), a);
      CAPTURE(noise_kind_name(kind));
      CAPTURE(a);
      REQUIRE(close_rel(fd, analytic, 1e-5));
    }
  }
}

TEST_CASE("neg_log_cdf_deriv is negative and nondecreasing") {
  for (NoiseKind kind : kAllKinds) {
    double prev = -std::numeric_limits<double>::infinity();
    for (double a = -40.0; a <= 40.0; a += 0.5) {
      const double d = neg_log_cdf_deriv(spec(kind), a);
      CHECK(d < 0.0);
      CHECK(d >= prev - 1e-12);
      prev = d;
    }
  }
}

TEST_CASE("midpoint convexity of -log_cdf") {
  Rng rng(7);
  for (NoiseKind kind : kAllKinds) {
    for (int trial = 0; trial < 10000; ++trial) {
      const double a = 60.0 * rng.u01() - 30.0;
      const double b = 60.0 * rng.u01() - 30.0;
      const double mid = -log_cdf(spec(kind), 0.5 * (a + b));
      const double ends =
          0.5 * (-log_cdf(spec(kind), a) - log_cdf(spec(kind), b));
      if (mid > ends + 1e-12) {
        CAPTURE(noise_kind_name(kind));
        CAPTURE(a);
        CAPTURE(b);
        REQUIRE(mid <= ends + 1e-12);
      }
    }
  }
}

TEST_CASE("quantile round trip cdf(quantile(u)) = u") {
  for (NoiseKind kind : kAllKinds) {
    for (double u = 1e-6; u < 1.0 - 1e-6; u += 7.3e-3) {
      const double back = cdf(spec(kind), quantile(spec(kind), u));
      CAPTURE(noise_kind_name(kind));
      CAPTURE(u);
      REQUIRE(std::fabs(back - u) <= 1e-9);
    }
  }
}

TEST_CASE("normal quantile spot values") {
  for (std::size_t i = 0; i < std::size(refvals::kNormalQuantileU); ++i) {
    CHECK(close_rel(norm_quantile(refvals::kNormalQuantileU[i]),
                    refvals::kNormalQuantile[i], 1e-13, 1e-15));
  }
}

TEST_CASE("sampler moments match the family's std") {
  Rng rng(11);
  auto moments = [](const std::vector<double>& xs) {
    const double mean =
        std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return std::pair<double, double>(mean, std::sqrt(var / xs.size()));
  };

  CHECK(sample(spec(NoiseKind::kLogistic), rng, 0).empty());

  auto [mean_l, std_l] = moments(sample(spec(NoiseKind::kLogistic), rng, 1000000));
  CHECK(std::fabs(mean_l) < 0.01);
  CHECK(std::fabs(std_l - M_PI / std::sqrt(3.0)) < 0.01);

  auto [mean_la, std_la] = moments(sample(spec(NoiseKind::kLaplace), rng, 1000000));
  CHECK(std::fabs(mean_la) < 0.01);
  CHECK(std::fabs(std_la - std::sqrt(2.0)) < 0.01);

  auto [mean_n, std_n] = moments(sample(spec(NoiseKind::kNormal), rng, 1000000));
  CHECK(std::fabs(mean_n) < 0.01);
  CHECK(std::fabs(std_n - 1.0) < 0.01);

  auto [mean_h, std_h] =
      moments(sample(spec(NoiseKind::kHyperbolicSecant), rng, 1000000));
  CHECK(std::fabs(mean_h) < 0.01);
  CHECK(std::fabs(std_h - 1.0) < 0.01);
}

TEST_CASE("sampler is deterministic given the seed") {
  Rng a(99), b(99);
  const auto xs = sample(spec(NoiseKind::kLaplace), a, 64);
  const auto ys = sample(spec(NoiseKind::kLaplace), b, 64);
  CHECK(xs == ys);
}

TEST_CASE("interval constants") {
  CHECK(constants(spec(NoiseKind::kLaplace), 3.7).zeta == 1.0);
  CHECK(constants(spec(NoiseKind::kLogistic), 0.4).zeta == 1.0);
  CHECK(constants(spec(NoiseKind::kHyperbolicSecant), 9.0).zeta ==
        doctest::Approx(M_PI / 2.0).epsilon(1e-15));
  CHECK(close_rel(constants(spec(NoiseKind::kLogistic), 2.0).big_t,
                  refvals::kLogisticBigTBetaF2, 1e-14));
  CHECK(close_rel(constants(spec(NoiseKind::kNormal), 2.0).zeta,
                  refvals::kNormalZetaBetaF2, 1e-12));
  for (NoiseKind kind : kAllKinds) {
    const auto c = constants(spec(kind), 1.7);
    CHECK(c.big_t == doctest::Approx(-log_cdf(spec(kind), -1.7)));
    CHECK(c.omega == doctest::Approx(pdf(spec(kind), 1.7)));
    CHECK(c.zeta > 0.0);
  }
}

TEST_CASE("scale parameter composes as F(a/s)") {
  const double s = 2.5;
  for (NoiseKind kind : kAllKinds) {
    for (double a : {-3.0, -0.4, 0.9, 7.0}) {
      CHECK(log_cdf(spec(kind, s), a) ==
            doctest::Approx(log_cdf(spec(kind), a / s)).epsilon(1e-14));
      CHECK(pdf(spec(kind, s), a) ==
            doctest::Approx(pdf(spec(kind), a / s) / s).epsilon(1e-14));
      CHECK(neg_log_cdf_deriv(spec(kind, s), a) ==
            doctest::Approx(neg_log_cdf_deriv(spec(kind), a / s) / s)
                .epsilon(1e-14));
    }
    CHECK(quantile(spec(kind, s), 0.73) ==
          doctest::Approx(s * quantile(spec(kind), 0.73)).epsilon(1e-14));
  }
}

TEST_CASE("domain errors") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(log_cdf(spec(NoiseKind::kLogistic), nan), DomainError);
  CHECK_THROWS_AS(log_cdf(spec(NoiseKind::kNormal), inf), DomainError);
  CHECK_THROWS_AS(pdf(spec(NoiseKind::kLaplace), nan), DomainError);
  CHECK_THROWS_AS(log_cdf({NoiseKind::kLogistic, 0.0}, 1.0), DomainError);
  CHECK_THROWS_AS(log_cdf({NoiseKind::kLogistic, -1.0}, 1.0), DomainError);
  CHECK_THROWS_AS(quantile(spec(NoiseKind::kLogistic), 0.0), DomainError);
  CHECK_THROWS_AS(quantile(spec(NoiseKind::kLogistic), 1.0), DomainError);
  CHECK_THROWS_AS(constants(spec(NoiseKind::kLogistic), 0.0), DomainError);
  CHECK_THROWS_AS(constants(spec(NoiseKind::kLogistic), -2.0), DomainError);
  CHECK_THROWS_AS(noise_kind_from_name("cauchy"), DomainError);
}

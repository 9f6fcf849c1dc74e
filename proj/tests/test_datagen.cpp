#include <doctest.h>

#include <cmath>

#include "core/datagen.hpp"
#include "core/errors.hpp"
#include "core/metric.hpp"
#include "core/rng.hpp"
#include "oracles/reference_values.hpp"
#include "testutil.hpp"

using namespace lindml;
using testutil::close_rel;

TEST_CASE("random_orthonormal") {
  Rng rng(51);
  const Matrix one = random_orthonormal(1, rng);
  CHECK(std::fabs(std::fabs(one(0, 0)) - 1.0) <= 1e-12);

  for (int d : {2, 5, 12}) {
    const Matrix u = random_orthonormal(d, rng);
    CHECK((u.transpose() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <=
          1e-10);
  }

  Rng a(77), b(77);
  CHECK(random_orthonormal(6, a) == random_orthonormal(6, b));
}

TEST_CASE("make_spd") {
  Rng rng(52);
  const Matrix c_ident = make_spd({2.5, 2.5, 2.5}, rng);
  CHECK(c_ident.isApprox(2.5 * Matrix::Identity(3, 3), 1e-10));

  // Canonical ground-truth spectrum padded with zeros has rank 5.
  std::vector<double> eigs = {0.32, 0.89, 0.59, 0.13, 0.14, 0, 0, 0, 0, 0};
  const Matrix m = make_spd(eigs, rng);
  const Vector spectrum = sym_eigendecomp(m).eigenvalues;
  CHECK(spectrum[0] == doctest::Approx(0.89).epsilon(1e-9));
  CHECK(spectrum[4] == doctest::Approx(0.13).epsilon(1e-9));
  CHECK(std::fabs(spectrum[5]) <= 1e-9);

  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> random_eigs;
    for (int i = 0; i < 6; ++i) random_eigs.push_back(rng.u01() * 3.0);
    const Matrix s = make_spd(random_eigs, rng);
    Vector recovered = sym_eigendecomp(s).eigenvalues;
    std::sort(random_eigs.begin(), random_eigs.end(), std::greater<>());
    for (int i = 0; i < 6; ++i) {
      CHECK(recovered[i] == doctest::Approx(random_eigs[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("sample_pairs") {
  Rng rng(53);
  const Matrix zero_cov = Matrix::Zero(3, 3);
  CHECK(sample_pairs(zero_cov, 5, rng).cwiseAbs().maxCoeff() == 0.0);

  // z = x - y with identity covariance has covariance 2I.
  Rng rng2(54);
  const Matrix z = sample_pairs(Matrix::Identity(3, 3), 100000, rng2);
  const Matrix cov = z.transpose() * z / z.rows();
  CHECK((cov - 2.0 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 0.05);

  Matrix not_psd = Matrix::Identity(2, 2);
  not_psd(1, 1) = -1.0;
  CHECK_THROWS_AS(sample_pairs(not_psd, 3, rng), DomainError);

  // Per-index substreams: a row's draw does not depend on n.
  Rng ra(55), rb(55);
  const Matrix za = sample_pairs(Matrix::Identity(2, 2), 10, ra);
  const Matrix zb = sample_pairs(Matrix::Identity(2, 2), 4, rb);
  CHECK(za.topRows(4) == zb);
}

TEST_CASE("expected_msq") {
  CHECK(expected_msq(Matrix::Identity(4, 4), Matrix::Identity(4, 4)) ==
        doctest::Approx(8.0));
  Matrix sa = Matrix::Zero(2, 2);
  sa.diagonal() << 0.5, 2.0;
  Matrix mb = Matrix::Zero(2, 2);
  mb.diagonal() << 3.0, 0.25;
  CHECK(expected_msq(sa, mb) == doctest::Approx(2.0 * (1.5 + 0.5)));
  CHECK_THROWS_AS(expected_msq(Matrix::Identity(2, 2), Matrix::Identity(3, 3)),
                  DimensionError);
}

TEST_CASE("canonical configuration concentrates near the documented scale") {
  // E||z||^2_{M*} = 2 tr(Sigma M*) for the canonical spectra; the value
  // depends on the random relative basis, so check the mean over seeds and
  // the per-seed empirical agreement.
  double acc = 0.0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    SyntheticSpec spec;
    spec.seed = static_cast<std::uint64_t>(seed);
    spec.n_pairs = 4000;
    Rng rng(spec.seed);
    Rng rng_m = rng.substream(1);
    Rng rng_s = rng.substream(2);
    Rng rng_z = rng.substream(3);
    std::vector<double> full(spec.dim, 0.0);
    std::copy(spec.m_star_eigs.begin(), spec.m_star_eigs.end(), full.begin());
    const Matrix m_star = make_spd(full, rng_m);
    const Matrix sigma = make_spd(spec.sigma_eigs, rng_s);
    const double expected = expected_msq(sigma, m_star);
    acc += expected;

    const Matrix z = sample_pairs(sigma, spec.n_pairs, rng_z);
    const double empirical =
        ((z * m_star).cwiseProduct(z)).rowwise().sum().mean();
    CHECK(close_rel(empirical, expected, 0.08));
  }
  CHECK(acc / seeds == doctest::Approx(1.73).epsilon(0.12));
}

TEST_CASE("label_norm_noise") {
  Rng rng(56);
  SyntheticSpec spec;
  spec.n_pairs = 2000;
  Rng gen_rng(spec.seed);
  Rng rng_m = gen_rng.substream(1);
  Rng rng_s = gen_rng.substream(2);
  Rng rng_z = gen_rng.substream(3);
  std::vector<double> full(spec.dim, 0.0);
  std::copy(spec.m_star_eigs.begin(), spec.m_star_eigs.end(), full.begin());
  const Matrix m_star = make_spd(full, rng_m);
  const Matrix sigma = make_spd(spec.sigma_eigs, rng_s);
  const Matrix zs = sample_pairs(sigma, spec.n_pairs, rng_z);

  // Vanishing noise scale: noisy equals clean.
  Rng label_rng(57);
  const LabelChannels tiny = label_norm_noise(
      zs, m_star, 1.3, NoiseSpec{NoiseKind::kLogistic, 1e-12}, label_rng);
  CHECK(tiny.noisy == tiny.clean);

  // Clean labels are the deterministic threshold rule.
  for (int i = 0; i < 50; ++i) {
    const double msq = zs.row(i) * m_star * zs.row(i).transpose();
    CHECK(tiny.clean[i] == (msq >= 1.3 ? 1 : -1));
  }

  // A pair exactly on the boundary flips a fair coin.
  Matrix boundary = Matrix::Zero(5000, 1);
  int far = 0;
  for (int rep = 0; rep < 5; ++rep) {
    Rng coin_rng(1000 + rep);
    const LabelChannels at_zero =
        label_norm_noise(boundary, Matrix::Identity(1, 1), 0.0,
                         NoiseSpec{NoiseKind::kLogistic, 1.0}, coin_rng);
    for (int i = 0; i < at_zero.noisy.size(); ++i) far += at_zero.noisy[i] == 1;
  }
  CHECK(std::fabs(far / 25000.0 - 0.5) < 0.02);
}

TEST_CASE("label_flip") {
  Rng rng(58);
  const Matrix zs = sample_pairs(Matrix::Identity(3, 3), 15000, rng);
  const Matrix m_star = Matrix::Identity(3, 3);

  Rng r0(59);
  const LabelChannels none = label_flip(zs, m_star, 6.0, 0.0, r0);
  CHECK(none.noisy == none.clean);

  Rng r1(60);
  const LabelChannels all = label_flip(zs, m_star, 6.0, 1.0, r1);
  int disagree = 0;
  for (int i = 0; i < all.noisy.size(); ++i) {
    disagree += all.noisy[i] != all.clean[i];
  }
  CHECK(std::fabs(disagree / 15000.0 - 0.5) < 0.02);

  Rng r2(61);
  const LabelChannels fifth = label_flip(zs, m_star, 6.0, 0.2, r2);
  disagree = 0;
  for (int i = 0; i < fifth.noisy.size(); ++i) {
    disagree += fifth.noisy[i] != fifth.clean[i];
  }
  CHECK(std::fabs(disagree / 15000.0 - 0.10) <= 0.01);

  CHECK_THROWS_AS(label_flip(zs, m_star, 6.0, 1.5, r2), DomainError);
}

TEST_CASE("calibrate_noise_scale closed-form single-margin case") {
  // One pair at margin exactly 1: expected mislabel sigma(-1/s) = 0.25
  // inverts to s = 1/log 3. The contract is 1e-4 accuracy in the fraction,
  // which maps to roughly 5e-4 relative accuracy in s here.
  Matrix z(1, 1);
  z << 1.0;
  Matrix m = Matrix::Identity(1, 1);
  const double s =
      calibrate_noise_scale(z, m, 0.0, NoiseKind::kLogistic, 0.25);
  CHECK(close_rel(s, refvals::kCalibrationScaleMargin1Target25, 1e-3));
  CHECK(std::fabs(cdf(NoiseSpec{NoiseKind::kLogistic, s}, -1.0) - 0.25) <=
        1e-4);
}

TEST_CASE("calibration reports an unreachable target with its bounds") {
  // A pair sitting exactly on the boundary mislabels with probability 1/2
  // at every scale, so the expected fraction is pinned at 0.5 and low
  // targets are unreachable.
  Matrix z(1, 1);
  z << 1.0;
  Matrix m = Matrix::Identity(1, 1);
  try {
    calibrate_noise_scale(z, m, 1.0, NoiseKind::kLogistic, 0.2);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.achieved_lo == doctest::Approx(0.5));
    CHECK(e.achieved_hi == doctest::Approx(0.5));
  }
}

TEST_CASE("expected mislabel fraction is monotone in the scale") {
  Rng rng(62);
  const Matrix zs = sample_pairs(Matrix::Identity(4, 4), 500, rng);
  const Matrix m_star = Matrix::Identity(4, 4);
  for (NoiseKind kind : {NoiseKind::kLogistic, NoiseKind::kNormal,
                         NoiseKind::kLaplace, NoiseKind::kHyperbolicSecant}) {
    double prev = -1.0;
    for (double s = 0.01; s < 100.0; s *= 3.0) {
      const double f = expected_mislabel_fraction(zs, m_star, 8.0, kind, s);
      CHECK(f >= prev);
      CHECK(f < 0.5);
      prev = f;
    }
  }
  const double s_small =
      calibrate_noise_scale(zs, m_star, 8.0, NoiseKind::kLogistic, 0.001);
  const double s_mid =
      calibrate_noise_scale(zs, m_star, 8.0, NoiseKind::kLogistic, 0.01);
  const double s_large =
      calibrate_noise_scale(zs, m_star, 8.0, NoiseKind::kLogistic, 0.1);
  CHECK(s_small < s_mid);
  CHECK(s_mid < s_large);
}

TEST_CASE("calibration hits the target realized fraction end to end") {
  for (NoiseKind kind : {NoiseKind::kLogistic, NoiseKind::kNormal,
                         NoiseKind::kLaplace, NoiseKind::kHyperbolicSecant}) {
    SyntheticSpec spec;
    spec.n_pairs = 15000;
    spec.noise_kind = kind;
    spec.target_mislabel = 0.10;
    spec.seed = 1234;
    const GenerationResult gen = generate(spec);
    CAPTURE(noise_kind_name(kind));
    CHECK(std::fabs(gen.realized_mislabel - 0.10) <= 0.01);
    CHECK(gen.noise_scale > 0.0);
  }
}

TEST_CASE("generate attaches the support bound and balance") {
  SyntheticSpec spec;
  spec.n_pairs = 500;
  spec.seed = 3;
  const GenerationResult gen = generate(spec);
  REQUIRE(gen.data.support_bound.has_value());
  CHECK(gen.data.z.rowwise().squaredNorm().maxCoeff() ==
        doctest::Approx(*gen.data.support_bound));
  CHECK(gen.far_fraction > 0.2);
  CHECK(gen.far_fraction < 0.8);
  REQUIRE(gen.data.clean_labels.has_value());

  // Clean labels identical across regimes for the same seed.
  SyntheticSpec flip_spec = spec;
  flip_spec.regime = NoiseRegime::kLabelFlip;
  flip_spec.flip_p = 0.2;
  const GenerationResult flip_gen = generate(flip_spec);
  CHECK(*flip_gen.data.clean_labels == *gen.data.clean_labels);
  CHECK(flip_gen.data.z == gen.data.z);
}

TEST_CASE("spec validation") {
  SyntheticSpec spec;
  spec.rank = 11;
  CHECK_THROWS_AS(generate(spec), DomainError);
  spec = SyntheticSpec{};
  spec.target_mislabel = 0.6;
  CHECK_THROWS_AS(generate(spec), DomainError);
  spec = SyntheticSpec{};
  spec.tau_star = 0.0;
  CHECK_THROWS_AS(generate(spec), DomainError);
  spec = SyntheticSpec{};
  spec.m_star_eigs = {0.1};
  CHECK_THROWS_AS(generate(spec), DomainError);
}

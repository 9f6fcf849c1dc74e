#include "core/datagen.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/metric.hpp"

namespace lindml {

namespace {

// Substream tags inside one generation seed.
enum : std::uint64_t {
  kStreamMStar = 1,
  kStreamSigma = 2,
  kStreamPairs = 3,
  kStreamLabels = 4,
};

Vector margins_of(const Matrix& zs, const Matrix& m_star, double tau_star) {
  return ((zs * m_star).cwiseProduct(zs)).rowwise().sum().array() - tau_star;
}

}  // namespace

void validate(const SyntheticSpec& spec) {
  if (spec.dim < 1) throw DomainError("SyntheticSpec: dim must be positive");
  if (spec.rank < 1 || spec.rank > spec.dim) {
    throw DomainError("SyntheticSpec: rank must lie in [1, dim]");
  }
  if (static_cast<int>(spec.m_star_eigs.size()) != spec.rank) {
    throw DomainError("SyntheticSpec: need exactly `rank` ground-truth eigenvalues");
  }
  if (static_cast<int>(spec.sigma_eigs.size()) != spec.dim) {
    throw DomainError("SyntheticSpec: need exactly `dim` covariance eigenvalues");
  }
  for (double e : spec.m_star_eigs) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw DomainError("SyntheticSpec: ground-truth eigenvalues must be >= 0");
    }
  }
  for (double e : spec.sigma_eigs) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw DomainError("SyntheticSpec: covariance eigenvalues must be >= 0");
    }
  }
  if (!(spec.tau_star > 0.0)) {
    throw DomainError("SyntheticSpec: tau_star must be positive");
  }
  if (spec.n_pairs < 0) {
    throw DomainError("SyntheticSpec: n_pairs must be nonnegative");
  }
  if (spec.regime == NoiseRegime::kNormNoise &&
      !(spec.target_mislabel >= 0.0 && spec.target_mislabel < 0.5)) {
    throw DomainError("SyntheticSpec: target_mislabel must lie in [0, 0.5)");
  }
  if (spec.regime == NoiseRegime::kLabelFlip &&
      !(spec.flip_p >= 0.0 && spec.flip_p <= 1.0)) {
    throw DomainError("SyntheticSpec: flip_p must lie in [0, 1]");
  }
}

Matrix random_orthonormal(int dim, Rng& rng) {
  if (dim < 1) throw DomainError("random_orthonormal: dim must be positive");
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix make_spd(const std::vector<double>& eigs, Rng& rng) {
  const int d = static_cast<int>(eigs.size());
  if (d < 1) throw DomainError("make_spd: need at least one eigenvalue");
  for (double e : eigs) {
    if (!std::isfinite(e)) throw DomainError("make_spd: eigenvalues must be finite");
  }
  const Matrix u = random_orthonormal(d, rng);
  Vector lam(d);
  for (int i = 0; i < d; ++i) lam[i] = eigs[i];
  Matrix out = u * lam.asDiagonal() * u.transpose();
  return 0.5 * (out + out.transpose());
}

Matrix sample_pairs(const Matrix& sigma, int n, Rng& rng) {
  const int d = static_cast<int>(sigma.rows());
  if (sigma.cols() != d) throw DomainError("sample_pairs: covariance not square");
  if (n < 0) throw DomainError("sample_pairs: n must be nonnegative");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sigma + sigma.transpose()));
  const double lam_max = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 0.0;
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, lam_max)) {
    throw DomainError("sample_pairs: covariance must be positive semi-definite");
  }
  const Matrix root = es.eigenvectors() *
                      es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                      es.eigenvectors().transpose();
  Matrix zs(n, d);
  Vector x(d), y(d);
  for (int i = 0; i < n; ++i) {
    Rng row = rng.substream(static_cast<std::uint64_t>(i));
    for (int j = 0; j < d; ++j) x[j] = row.normal();
    for (int j = 0; j < d; ++j) y[j] = row.normal();
    zs.row(i) = (root * (x - y)).transpose();
  }
  return zs;
}

double expected_msq(const Matrix& sigma, const Matrix& m) {
  if (sigma.rows() != m.rows() || sigma.cols() != m.cols()) {
    throw DimensionError("expected_msq: shapes differ");
  }
  return 2.0 * (sigma * m).trace();
}

LabelChannels label_norm_noise(const Matrix& zs, const Matrix& m_star,
                               double tau_star, const NoiseSpec& noise,
                               Rng& rng) {
  validate(noise);
  if (zs.cols() != m_star.rows()) {
    throw DimensionError("label_norm_noise: dimensions differ");
  }
  const int n = static_cast<int>(zs.rows());
  const Vector margins = margins_of(zs, m_star, tau_star);
  LabelChannels out;
  out.noisy.resize(n);
  out.clean.resize(n);
  for (int i = 0; i < n; ++i) {
    Rng row = rng.substream(static_cast<std::uint64_t>(i));
    const double eta = quantile(noise, row.u01());
    out.noisy[i] = margins[i] + eta >= 0.0 ? 1 : -1;
    out.clean[i] = margins[i] >= 0.0 ? 1 : -1;
  }
  return out;
}

LabelChannels label_flip(const Matrix& zs, const Matrix& m_star,
                         double tau_star, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("label_flip: p must lie in [0, 1]");
  }
  if (zs.cols() != m_star.rows()) {
    throw DimensionError("label_flip: dimensions differ");
  }
  const int n = static_cast<int>(zs.rows());
  const Vector margins = margins_of(zs, m_star, tau_star);
  LabelChannels out;
  out.noisy.resize(n);
  out.clean.resize(n);
  for (int i = 0; i < n; ++i) {
    Rng row = rng.substream(static_cast<std::uint64_t>(i));
    out.clean[i] = margins[i] >= 0.0 ? 1 : -1;
    if (row.u01() < p) {
      out.noisy[i] = row.u01() < 0.5 ? -1 : 1;
    } else {
      out.noisy[i] = out.clean[i];
    }
  }
  return out;
}

double expected_mislabel_fraction(const Matrix& zs, const Matrix& m_star,
                                  double tau_star, NoiseKind kind, double s) {
  const Vector margins = margins_of(zs, m_star, tau_star);
  const NoiseSpec noise{kind, s};
  double acc = 0.0;
  for (int i = 0; i < margins.size(); ++i) {
    acc += cdf(noise, -std::fabs(margins[i]));
  }
  return margins.size() > 0 ? acc / static_cast<double>(margins.size()) : 0.0;
}

double calibrate_noise_scale(const Matrix& zs, const Matrix& m_star,
                             double tau_star, NoiseKind kind, double target) {
  if (!(target > 0.0 && target < 0.5)) {
    throw DomainError("calibrate_noise_scale: target must lie in (0, 0.5)");
  }
  if (zs.rows() == 0) {
    throw InfeasibleError("calibrate_noise_scale: empty sample", 0.0, 0.0);
  }
  double lo = 1e-6;
  double hi = 1e6;
  auto frac = [&](double s) {
    return expected_mislabel_fraction(zs, m_star, tau_star, kind, s);
  };
  const double f_lo = frac(lo);
  const double f_hi = frac(hi);
  if (f_lo > target || f_hi < target) {
    throw InfeasibleError(
        "calibrate_noise_scale: target mislabel fraction unreachable; "
        "achievable range [" + std::to_string(f_lo) + ", " +
            std::to_string(f_hi) + "]",
        f_lo, f_hi);
  }
  double s = 1.0;
  for (int it = 0; it < 200; ++it) {
    s = std::sqrt(lo * hi);  // geometric midpoint across 12 decades
    const double f = frac(s);
    if (std::fabs(f - target) <= 1e-4) return s;
    if (f < target) {
      lo = s;
    } else {
      hi = s;
    }
  }
  return s;
}

GenerationResult generate(const SyntheticSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);

  std::vector<double> full_eigs(spec.dim, 0.0);
  std::copy(spec.m_star_eigs.begin(), spec.m_star_eigs.end(), full_eigs.begin());
  Rng rng_mstar = rng.substream(kStreamMStar);
  Rng rng_sigma = rng.substream(kStreamSigma);
  Rng rng_pairs = rng.substream(kStreamPairs);
  Rng rng_labels = rng.substream(kStreamLabels);

  GenerationResult out;
  out.star.m = make_spd(full_eigs, rng_mstar);
  out.star.tau = spec.tau_star;
  const Matrix sigma = make_spd(spec.sigma_eigs, rng_sigma);
  const Matrix zs = sample_pairs(sigma, spec.n_pairs, rng_pairs);

  LabelChannels labels;
  if (spec.n_pairs == 0) {
    labels.noisy.resize(0);
    labels.clean.resize(0);
  } else if (spec.regime == NoiseRegime::kNormNoise) {
    if (spec.target_mislabel == 0.0) {
      out.noise_scale = 0.0;
      labels = label_flip(zs, out.star.m, spec.tau_star, 0.0, rng_labels);
    } else {
      out.noise_scale = calibrate_noise_scale(zs, out.star.m, spec.tau_star,
                                              spec.noise_kind,
                                              spec.target_mislabel);
      labels = label_norm_noise(zs, out.star.m, spec.tau_star,
                                NoiseSpec{spec.noise_kind, out.noise_scale},
                                rng_labels);
    }
  } else {
    labels = label_flip(zs, out.star.m, spec.tau_star, spec.flip_p, rng_labels);
  }

  out.data = make_dataset(zs, labels.noisy, labels.clean);
  int mismatches = 0;
  int far = 0;
  for (int i = 0; i < spec.n_pairs; ++i) {
    mismatches += labels.noisy[i] != labels.clean[i];
    far += labels.noisy[i] == 1;
  }
  out.realized_mislabel =
      spec.n_pairs > 0 ? static_cast<double>(mismatches) / spec.n_pairs : 0.0;
  out.far_fraction =
      spec.n_pairs > 0 ? static_cast<double>(far) / spec.n_pairs : 0.0;
  return out;
}

}  // namespace lindml

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/noise.hpp"
#include "core/types.hpp"

namespace lindml {

enum class NoiseRegime { kNormNoise, kLabelFlip };

// Recipe for one synthetic problem instance: spectra for the ground-truth
// metric and the sampling covariance, the threshold, and the labeling
// regime. Ground truth is rank `rank` in dimension `dim` (remaining
// eigenvalues are zero).
struct SyntheticSpec {
  int dim = 10;
  int rank = 5;
  std::vector<double> m_star_eigs = {0.32, 0.89, 0.59, 0.13, 0.14};
  std::vector<double> sigma_eigs = {0.73, 0.7, 0.68, 0.59, 0.47,
                                    0.45, 0.21, 0.19, 0.11, 0.04};
  double tau_star = 1.3;
  int n_pairs = 20000;
  NoiseRegime regime = NoiseRegime::kNormNoise;
  NoiseKind noise_kind = NoiseKind::kLogistic;
  double target_mislabel = 0.10;  // NormNoise regime
  double flip_p = 0.2;            // LabelFlip regime
  std::uint64_t seed = 0;
};

void validate(const SyntheticSpec& spec);

// Haar-distributed orthonormal matrix (QR of a Gaussian matrix with the
// sign convention fixed).
Matrix random_orthonormal(int dim, Rng& rng);

// Symmetric matrix with the given spectrum in a random orthonormal basis.
Matrix make_spd(const std::vector<double>& eigs, Rng& rng);

// N difference vectors z = x - y with x, y ~ N(0, sigma), so z ~ N(0, 2*sigma).
// Rows are drawn from per-index substreams, independent of evaluation order.
Matrix sample_pairs(const Matrix& sigma, int n, Rng& rng);

// E ||x - y||_M^2 = 2 tr(sigma * M) for x, y i.i.d. with covariance sigma.
double expected_msq(const Matrix& sigma, const Matrix& m);

struct LabelChannels {
  IntVector noisy;
  IntVector clean;
};

// Threshold labeling with additive noise on the squared distance:
// noisy = +1 iff ||z||_M^2 + eta >= tau; clean = +1 iff ||z||_M^2 >= tau.
LabelChannels label_norm_noise(const Matrix& zs, const Matrix& m_star,
                               double tau_star, const NoiseSpec& noise,
                               Rng& rng);

// Clean threshold labels, then each label independently gets resampled
// uniformly from {-1,+1} with probability p (so p/2 expected mislabels).
LabelChannels label_flip(const Matrix& zs, const Matrix& m_star,
                         double tau_star, double p, Rng& rng);

// Expected mislabel fraction at scale s: mean over rows of
// CDF(-|margin| / s). Monotone increasing in s.
double expected_mislabel_fraction(const Matrix& zs, const Matrix& m_star,
                                  double tau_star, NoiseKind kind, double s);

// Bisection for the scale meeting the target expected mislabel fraction
// within 1e-4, searched over [1e-6, 1e6].
double calibrate_noise_scale(const Matrix& zs, const Matrix& m_star,
                             double tau_star, NoiseKind kind, double target);

struct GenerationResult {
  Dataset data;
  MetricModel star;
  double realized_mislabel = 0.0;
  double noise_scale = 0.0;  // calibrated s (NormNoise regime only)
  double far_fraction = 0.0; // class balance of the noisy labels
};

GenerationResult generate(const SyntheticSpec& spec);

}  // namespace lindml

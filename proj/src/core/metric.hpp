#pragma once

#include <utility>
#include <vector>

#include "core/types.hpp"

namespace lindml {

// z^T M z for the metric form, ||A^T z||^2 for the factor form.
double mahalanobis_sq(const MetricModel& model, const Vector& z);
double mahalanobis_sq(const FactorModel& model, const Vector& z);

// Converts the unconstrained parameterization to the PSD cone; tau is
// clamped to zero at this boundary only.
MetricModel factor_to_metric(const FactorModel& f);

// Dense symmetric eigendecomposition with eigenvalues in descending order
// and matching orthonormal eigenvector columns.
struct EigenDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;
};
EigenDecomposition sym_eigendecomp(const Matrix& matrix);

// Zeroes all but the k largest eigenvalues. gamma is the largest
// eigenvalue set to zero (0 when k = dim).
std::pair<MetricModel, double> truncate_metric(const MetricModel& m, int k);

// Zeroes all but the k largest singular values of the factor. gamma_sv is
// the largest singular value set to zero.
std::pair<FactorModel, double> truncate_factor(const FactorModel& f, int k);

// d((M1,t1),(M2,t2)) = ||M1 - M2||_2 + |t1 - t2|.
double model_distance(const MetricModel& a, const MetricModel& b);

// Monte Carlo estimate of the data-weighted L1 distance between the two
// models' decision margins, averaging over the provided sample.
double l1f_distance_mc(const MetricModel& a, const MetricModel& b,
                       const std::vector<Vector>& zs);

// Model for data transformed by z' = U z: M' = U^{-T} M U^{-1}, tau
// unchanged. Rejects numerically singular U (condition above 1e12).
MetricModel unit_change(const MetricModel& m, const Matrix& u);

// +1 (Far) when the squared distance reaches tau, else -1; ties are Far.
int predict(const MetricModel& model, const Vector& z);
int predict(const FactorModel& model, const Vector& z);

// Relative recovery errors of hat against star after normalizing each
// model by its threshold: ||Mh/th - Ms/ts|| / ||Ms/ts|| in the spectral
// and Frobenius norms.
struct RelativeErrors {
  double spectral;
  double frobenius;
};
RelativeErrors relative_errors(const MetricModel& hat, const MetricModel& star);

// Spectral norm of a symmetric matrix (largest |eigenvalue|).
double sym_spectral_norm(const Matrix& matrix);

}  // namespace lindml

#include "core/normalize.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/metric.hpp"

namespace lindml {

Matrix normalize_transform(const Dataset& data, NormalizeMode mode) {
  const int d = data.dim;
  if (data.num_pairs() == 0) {
    throw DomainError("normalize_transform: dataset must be nonempty");
  }
  switch (mode) {
    case NormalizeMode::kNone:
      return Matrix::Identity(d, d);
    case NormalizeMode::kStandardize: {
      Matrix u = Matrix::Zero(d, d);
      const Vector rms =
          (data.z.colwise().squaredNorm() / data.num_pairs()).cwiseSqrt();
      const double floor = 1e-15 * std::max(1.0, rms.maxCoeff());
      for (int j = 0; j < d; ++j) {
        u(j, j) = rms[j] > floor ? 1.0 / rms[j] : 1.0;
      }
      return u;
    }
    case NormalizeMode::kWhiten: {
      const Matrix second_moment =
          data.z.transpose() * data.z / data.num_pairs();
      const EigenDecomposition ed = sym_eigendecomp(second_moment);
      const double cutoff = 1e-10 * std::max(0.0, ed.eigenvalues[0]);
      Vector inv_root = Vector::Zero(d);
      for (int i = 0; i < d; ++i) {
        if (ed.eigenvalues[i] > cutoff) {
          inv_root[i] = 1.0 / std::sqrt(ed.eigenvalues[i]);
        }
      }
      Matrix u = ed.eigenvectors * inv_root.asDiagonal() *
                 ed.eigenvectors.transpose();
      return 0.5 * (u + u.transpose());
    }
  }
  throw DomainError("normalize_transform: unknown mode");
}

Dataset apply_transform(const Dataset& data, const Matrix& u) {
  if (u.rows() != data.dim || u.cols() != data.dim) {
    throw DimensionError("apply_transform: transform shape mismatch");
  }
  Dataset out = data;
  out.z = data.z * u.transpose();
  out.support_bound =
      out.num_pairs() > 0
          ? std::optional<double>(out.z.rowwise().squaredNorm().maxCoeff())
          : std::nullopt;
  return out;
}

MetricModel back_transform(const MetricModel& fitted_on_transformed,
                           const Matrix& u) {
  if (u.rows() != fitted_on_transformed.dim() ||
      u.cols() != fitted_on_transformed.dim()) {
    throw DimensionError("back_transform: transform shape mismatch");
  }
  MetricModel out;
  Matrix m = u.transpose() * fitted_on_transformed.m * u;
  out.m = 0.5 * (m + m.transpose());
  out.tau = fitted_on_transformed.tau;
  return out;
}

FactorModel back_transform(const FactorModel& fitted_on_transformed,
                           const Matrix& u) {
  if (u.rows() != fitted_on_transformed.dim() ||
      u.cols() != fitted_on_transformed.dim()) {
    throw DimensionError("back_transform: transform shape mismatch");
  }
  FactorModel out;
  out.factor = u.transpose() * fitted_on_transformed.factor;
  out.tau = fitted_on_transformed.tau;
  return out;
}

}  // namespace lindml

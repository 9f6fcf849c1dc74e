#include "core/metric.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "core/errors.hpp"

namespace lindml {

namespace {

void require_same_dim(int model_dim, const Vector& z, const char* op) {
  if (static_cast<int>(z.size()) != model_dim) {
    throw DimensionError(std::string(op) + ": vector dimension " +
                         std::to_string(z.size()) + " does not match model dimension " +
                         std::to_string(model_dim));
  }
}

void require_symmetric(const Matrix& m, const char* op) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(op) + ": matrix is not square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw DomainError(std::string(op) + ": matrix is not symmetric");
  }
}

}  // namespace

void validate(const MetricModel& model) {
  if (model.m.rows() != model.m.cols() || model.m.rows() < 1) {
    throw DimensionError("MetricModel: matrix must be square and nonempty");
  }
  if (!model.m.allFinite() || !std::isfinite(model.tau)) {
    throw DomainError("MetricModel: entries must be finite");
  }
  if ((model.m - model.m.transpose()).cwiseAbs().maxCoeff() > 1e-10 *
      std::max(1.0, model.m.cwiseAbs().maxCoeff())) {
    throw DomainError("MetricModel: matrix must be symmetric");
  }
  if (model.tau < 0.0) {
    throw DomainError("MetricModel: tau must be nonnegative");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(model.m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, es.eigenvalues().maxCoeff())) {
    throw DomainError("MetricModel: matrix must be positive semi-definite");
  }
}

void validate(const FactorModel& model) {
  if (model.factor.rows() < 1 || model.factor.cols() < 1 ||
      model.factor.cols() > model.factor.rows()) {
    throw DimensionError("FactorModel: factor must be d x k with 1 <= k <= d");
  }
  if (!model.factor.allFinite() || !std::isfinite(model.tau)) {
    throw DomainError("FactorModel: entries must be finite");
  }
}

void validate(const Dataset& data) {
  if (data.z.cols() != data.dim) {
    throw DimensionError("Dataset: z column count does not match dim");
  }
  if (data.labels.size() != data.z.rows()) {
    throw DimensionError("Dataset: labels length does not match pair count");
  }
  if (!data.z.allFinite()) {
    throw DomainError("Dataset: difference vectors must be finite");
  }
  for (int i = 0; i < data.labels.size(); ++i) {
    if (data.labels[i] != 1 && data.labels[i] != -1) {
      throw DomainError("Dataset: labels must be -1 or +1");
    }
  }
  if (data.clean_labels) {
    if (data.clean_labels->size() != data.labels.size()) {
      throw DimensionError("Dataset: clean label channel length mismatch");
    }
    for (int i = 0; i < data.clean_labels->size(); ++i) {
      if ((*data.clean_labels)[i] != 1 && (*data.clean_labels)[i] != -1) {
        throw DomainError("Dataset: clean labels must be -1 or +1");
      }
    }
  }
  if (data.support_bound) {
    if (data.num_pairs() > 0 &&
        data.z.rowwise().squaredNorm().maxCoeff() > *data.support_bound * (1.0 + 1e-12)) {
      throw DomainError("Dataset: a pair exceeds the declared support bound");
    }
  }
}

Dataset make_dataset(const Matrix& z, const IntVector& labels,
                     const std::optional<IntVector>& clean_labels) {
  Dataset data;
  data.dim = static_cast<int>(z.cols());
  data.z = z;
  data.labels = labels;
  data.clean_labels = clean_labels;
  data.support_bound =
      z.rows() > 0 ? std::optional<double>(z.rowwise().squaredNorm().maxCoeff())
                   : std::nullopt;
  validate(data);
  return data;
}

Dataset slice(const Dataset& data, int start, int count) {
  if (start < 0 || count < 0 || start + count > data.num_pairs()) {
    throw DomainError("slice: range out of bounds");
  }
  Dataset out;
  out.dim = data.dim;
  out.z = data.z.middleRows(start, count);
  out.labels = data.labels.segment(start, count);
  if (data.clean_labels) {
    out.clean_labels = data.clean_labels->segment(start, count);
  }
  out.support_bound =
      count > 0 ? std::optional<double>(out.z.rowwise().squaredNorm().maxCoeff())
                : std::nullopt;
  return out;
}

double mahalanobis_sq(const MetricModel& model, const Vector& z) {
  require_same_dim(model.dim(), z, "mahalanobis_sq");
  return z.dot(model.m * z);
}

double mahalanobis_sq(const FactorModel& model, const Vector& z) {
  require_same_dim(model.dim(), z, "mahalanobis_sq");
  return (model.factor.transpose() * z).squaredNorm();
}

MetricModel factor_to_metric(const FactorModel& f) {
  MetricModel out;
  Matrix m = f.factor * f.factor.transpose();
  out.m = 0.5 * (m + m.transpose());
  out.tau = std::max(f.tau, 0.0);
  return out;
}

EigenDecomposition sym_eigendecomp(const Matrix& matrix) {
  require_symmetric(matrix, "sym_eigendecomp");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (matrix + matrix.transpose()));
  if (es.info() != Eigen::Success) {
    throw DomainError("sym_eigendecomp: eigensolver failed to converge");
  }
  const int d = static_cast<int>(matrix.rows());
  EigenDecomposition out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors.resize(d, d);
  for (int j = 0; j < d; ++j) {
    out.eigenvectors.col(j) = es.eigenvectors().col(d - 1 - j);
  }
  return out;
}

std::pair<MetricModel, double> truncate_metric(const MetricModel& m, int k) {
  const int d = m.dim();
  if (k < 1 || k > d) {
    throw DomainError("truncate_metric: k must lie in [1, dim]");
  }
  EigenDecomposition ed = sym_eigendecomp(m.m);
  const double gamma = k == d ? 0.0 : std::max(ed.eigenvalues[k], 0.0);
  Vector lam = ed.eigenvalues;
  for (int i = 0; i < d; ++i) {
    lam[i] = i < k ? std::max(lam[i], 0.0) : 0.0;
  }
  MetricModel out;
  Matrix rebuilt =
      ed.eigenvectors * lam.asDiagonal() * ed.eigenvectors.transpose();
  out.m = 0.5 * (rebuilt + rebuilt.transpose());
  out.tau = m.tau;
  return {out, gamma};
}

std::pair<FactorModel, double> truncate_factor(const FactorModel& f, int k) {
  if (k < 1 || k > f.rank_bound()) {
    throw DomainError("truncate_factor: k must lie in [1, rank_bound]");
  }
  Eigen::JacobiSVD<Matrix> svd(f.factor,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector sv = svd.singularValues();
  const int n_sv = static_cast<int>(sv.size());
  const double gamma_sv = k < n_sv ? sv[k] : 0.0;
  for (int i = k; i < n_sv; ++i) sv[i] = 0.0;
  FactorModel out;
  out.factor = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
  out.tau = f.tau;
  return {out, gamma_sv};
}

double sym_spectral_norm(const Matrix& matrix) {
  if (matrix.size() == 0) return 0.0;
  EigenDecomposition ed = sym_eigendecomp(matrix);
  return ed.eigenvalues.cwiseAbs().maxCoeff();
}

double model_distance(const MetricModel& a, const MetricModel& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("model_distance: dimensions differ");
  }
  return sym_spectral_norm(a.m - b.m) + std::fabs(a.tau - b.tau);
}

double l1f_distance_mc(const MetricModel& a, const MetricModel& b,
                       const std::vector<Vector>& zs) {
  if (a.dim() != b.dim()) {
    throw DimensionError("l1f_distance_mc: dimensions differ");
  }
  if (zs.empty()) {
    throw DomainError("l1f_distance_mc: sample must be nonempty");
  }
  double acc = 0.0;
  for (const Vector& z : zs) {
    const double margin_a = mahalanobis_sq(a, z) - a.tau;
    const double margin_b = mahalanobis_sq(b, z) - b.tau;
    acc += std::fabs(margin_a - margin_b);
  }
  return acc / static_cast<double>(zs.size());
}

MetricModel unit_change(const MetricModel& m, const Matrix& u) {
  if (u.rows() != m.dim() || u.cols() != m.dim()) {
    throw DimensionError("unit_change: transform shape does not match model");
  }
  Eigen::JacobiSVD<Matrix> svd(u);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0) || smax / smin > 1e12) {
    throw DomainError("unit_change: transform is numerically singular "
                      "(condition > 1e12)");
  }
  const Matrix u_inv = u.partialPivLu().inverse();
  Matrix transformed = u_inv.transpose() * m.m * u_inv;
  MetricModel out;
  out.m = 0.5 * (transformed + transformed.transpose());
  out.tau = m.tau;
  return out;
}

int predict(const MetricModel& model, const Vector& z) {
  return mahalanobis_sq(model, z) >= model.tau ? 1 : -1;
}

int predict(const FactorModel& model, const Vector& z) {
  return mahalanobis_sq(model, z) >= model.tau ? 1 : -1;
}

RelativeErrors relative_errors(const MetricModel& hat, const MetricModel& star) {
  if (hat.dim() != star.dim()) {
    throw DimensionError("relative_errors: dimensions differ");
  }
  if (!(hat.tau > 0.0) || !(star.tau > 0.0)) {
    throw DomainError("relative_errors: thresholds must be positive "
                      "(ratio M/tau undefined)");
  }
  const Matrix hat_n = hat.m / hat.tau;
  const Matrix star_n = star.m / star.tau;
  const Matrix diff = hat_n - star_n;
  RelativeErrors out;
  out.spectral = sym_spectral_norm(diff) / sym_spectral_norm(star_n);
  out.frobenius = diff.norm() / star_n.norm();
  return out;
}

}  // namespace lindml

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace lindml {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

// Hypothesis in the constrained parameterization: symmetric PSD matrix and
// a nonnegative threshold. Also used to carry ground-truth parameters.
struct MetricModel {
  Matrix m;
  double tau = 0.0;

  int dim() const { return static_cast<int>(m.rows()); }
};

// Unconstrained parameterization: the metric matrix factors as
// factor * factor^T (d x k, k <= d) and tau is a free real.
struct FactorModel {
  Matrix factor;
  double tau = 0.0;

  int dim() const { return static_cast<int>(factor.rows()); }
  int rank_bound() const { return static_cast<int>(factor.cols()); }
};

// One observation: the difference vector z = x - y and its label,
// -1 = Close, +1 = Far.
struct LabeledPair {
  Vector z;
  int label = 1;
};

// N labeled pairs with a shared dimension. Rows of z are the difference
// vectors. clean_labels optionally carries the pre-noise ground truth.
struct Dataset {
  int dim = 0;
  Matrix z;                               // N x dim
  IntVector labels;                       // entries in {-1, +1}
  std::optional<IntVector> clean_labels;  // parallel to labels
  std::optional<double> support_bound;    // F = max ||z||^2

  int num_pairs() const { return static_cast<int>(z.rows()); }

  LabeledPair pair(int i) const {
    return LabeledPair{z.row(i).transpose(), labels[i]};
  }
};

// Invariant checks; each throws on violation (see errors.hpp).
void validate(const MetricModel& model);
void validate(const FactorModel& model);
void validate(const Dataset& data);

Dataset make_dataset(const Matrix& z, const IntVector& labels,
                     const std::optional<IntVector>& clean_labels);

// Contiguous [start, start + count) slice of a dataset.
Dataset slice(const Dataset& data, int start, int count);

}  // namespace lindml

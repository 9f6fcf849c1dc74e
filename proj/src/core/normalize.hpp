#pragma once

#include "core/types.hpp"

namespace lindml {

enum class NormalizeMode { kNone, kStandardize, kWhiten };

// Linear preprocessing transform z' = U z computed from the data:
//   kStandardize: U = diag(1 / rms_j), per-coordinate root-mean-square;
//   kWhiten:      U = C^{-1/2} from the second-moment matrix C, with
//                 eigenvalues below 1e-10 * lambda_max treated as zero
//                 (pseudo-inverse root), so U may be singular.
Matrix normalize_transform(const Dataset& data, NormalizeMode mode);

// Applies z' = U z to every pair (labels untouched).
Dataset apply_transform(const Dataset& data, const Matrix& u);

// Model fitted on transformed data mapped back to original units:
// M = U^T M' U, tau unchanged. Valid for singular U as well.
MetricModel back_transform(const MetricModel& fitted_on_transformed,
                           const Matrix& u);
FactorModel back_transform(const FactorModel& fitted_on_transformed,
                           const Matrix& u);

}  // namespace lindml

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/noise.hpp"
#include "core/types.hpp"

namespace lindml {

struct SolverConfig {
  double learning_rate = 0.5;
  double decay = 0.95;       // applied every decay_interval iterations
  int max_iters = 30000;
  int rank_bound = 0;        // 0 means full rank (k = d)
  double init_scale = 1e-4;
  std::uint64_t seed = 0;
  int batch_size = 0;        // 0 means full batch
  double stop_tol = 1e-8;    // gradient-norm stopping threshold
  int history_stride = 100;  // full-batch loss recorded every this many iters
  int decay_interval = 100;
};

void validate(const SolverConfig& cfg);

struct FitResult {
  FactorModel model;
  std::vector<std::pair<int, double>> loss_history;  // (iteration, R_N)
  int iterations_run = 0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;  // seconds
};

// Gradient descent over the factor parameterization (tau unconstrained
// during descent). When the loss turns non-finite the learning rate is
// halved and the run restarts from the last finite iterate, at most five
// times; a DivergenceError reports the iteration otherwise.
FitResult fit_factor(const Dataset& data, const NoiseSpec& noise,
                     const SolverConfig& cfg);

// Reference solver over the PSD cone itself: gradient step in M followed by
// eigenvalue clipping, tau clamped to [0, inf). Guarded to dim <= 32; this
// path exists to cross-check the factor solver, not to replace it.
MetricModel fit_projected(const Dataset& data, const NoiseSpec& noise,
                          const SolverConfig& cfg);

}  // namespace lindml

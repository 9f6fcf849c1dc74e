#include "core/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/risk.hpp"

namespace lindml {

namespace {

constexpr int kMaxRestarts = 5;

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double hi = values[mid];
  if (values.size() % 2 == 0) {
    const double lo = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lo + hi);
  }
  return hi;
}

Matrix gaussian_matrix(int rows, int cols, double scale, Rng& rng) {
  Matrix a(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      a(i, j) = scale * rng.normal();
    }
  }
  return a;
}

Dataset gather(const Dataset& data, const std::vector<int>& index, int start,
               int len) {
  Dataset out;
  out.dim = data.dim;
  out.z.resize(len, data.dim);
  out.labels.resize(len);
  for (int i = 0; i < len; ++i) {
    out.z.row(i) = data.z.row(index[start + i]);
    out.labels[i] = data.labels[index[start + i]];
  }
  return out;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

void validate(const SolverConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) {
    throw DomainError("SolverConfig: learning_rate must be positive");
  }
  if (!(cfg.decay > 0.0 && cfg.decay <= 1.0)) {
    throw DomainError("SolverConfig: decay must lie in (0, 1]");
  }
  if (cfg.max_iters < 1) {
    throw DomainError("SolverConfig: max_iters must be at least 1");
  }
  if (cfg.rank_bound < 0) {
    throw DomainError("SolverConfig: rank_bound must be nonnegative");
  }
  if (!(cfg.init_scale > 0.0)) {
    throw DomainError("SolverConfig: init_scale must be positive");
  }
  if (cfg.batch_size < 0) {
    throw DomainError("SolverConfig: batch_size must be nonnegative");
  }
  if (cfg.history_stride < 1 || cfg.decay_interval < 1) {
    throw DomainError("SolverConfig: strides must be at least 1");
  }
}

FitResult fit_factor(const Dataset& data, const NoiseSpec& noise,
                     const SolverConfig& cfg) {
  validate(cfg);
  validate(noise);
  if (data.num_pairs() == 0) {
    throw DomainError("fit_factor: dataset must be nonempty");
  }
  const int d = data.dim;
  const int k = cfg.rank_bound == 0 ? d : cfg.rank_bound;
  if (k < 1 || k > d) {
    throw DomainError("fit_factor: rank_bound must lie in [1, dim]");
  }
  const int n = data.num_pairs();
  const bool full_batch = cfg.batch_size == 0 || cfg.batch_size >= n;

  Stopwatch timer;
  Rng rng(cfg.seed);
  FactorModel iterate;
  iterate.factor = gaussian_matrix(d, k, cfg.init_scale, rng);
  {
    const Vector msq = (data.z * iterate.factor).rowwise().squaredNorm();
    iterate.tau = median(std::vector<double>(msq.data(), msq.data() + n));
  }

  RiskContext full_ctx{&data, noise};
  FitResult result;
  result.seed = cfg.seed;

  double lr = cfg.learning_rate;
  int restarts = 0;
  FactorModel last_finite = iterate;
  FactorGradient grad;

  auto record = [&](int iteration, double loss) {
    if (!result.loss_history.empty() &&
        result.loss_history.back().first == iteration) {
      return;
    }
    result.loss_history.emplace_back(iteration, loss);
  };

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const int batches_per_epoch =
      full_batch ? 1 : (n + cfg.batch_size - 1) / cfg.batch_size;
  std::uint64_t epoch = 0;
  int batch_in_epoch = 0;
  Dataset batch;
  RiskContext batch_ctx{nullptr, noise};

  int iter = 0;
  while (iter < cfg.max_iters) {
    double loss;
    if (full_batch) {
      loss = risk_value_and_gradient(full_ctx, iterate, &grad);
    } else {
      if (batch_in_epoch == 0) {
        Rng shuffle_rng = Rng(cfg.seed).substream(0x5u).substream(epoch);
        for (int i = n - 1; i > 0; --i) {
          const int j = static_cast<int>(shuffle_rng.next_u64() % (i + 1));
          std::swap(order[i], order[j]);
        }
      }
      const int start = batch_in_epoch * cfg.batch_size;
      const int len = std::min(cfg.batch_size, n - start);
      batch = gather(data, order, start, len);
      batch_ctx.data = &batch;
      loss = risk_value_and_gradient(batch_ctx, iterate, &grad);
    }

    const bool finite = std::isfinite(loss) && grad.factor.allFinite() &&
                        std::isfinite(grad.tau);
    if (!finite) {
      if (++restarts > kMaxRestarts) {
        throw DivergenceError(
            "fit_factor: loss became non-finite at iteration " +
                std::to_string(iter) + " after " +
                std::to_string(kMaxRestarts) + " learning-rate restarts",
            iter);
      }
      lr *= 0.5;
      iterate = last_finite;
      continue;
    }
    last_finite = iterate;

    if (full_batch && iter % cfg.history_stride == 0) {
      record(iter, loss);
    } else if (!full_batch && iter % cfg.history_stride == 0) {
      record(iter, empirical_risk(full_ctx, iterate));
    }

    if (full_batch) {
      const double grad_norm = std::sqrt(grad.factor.squaredNorm() +
                                         grad.tau * grad.tau);
      if (grad_norm <= cfg.stop_tol) {
        ++iter;
        break;
      }
    }

    iterate.factor.noalias() -= lr * grad.factor;
    iterate.tau -= lr * grad.tau;
    ++iter;

    if (full_batch) {
      if (iter % cfg.decay_interval == 0) lr *= cfg.decay;
    } else if (++batch_in_epoch == batches_per_epoch) {
      batch_in_epoch = 0;
      ++epoch;
      lr *= cfg.decay;
    }
  }

  result.iterations_run = iter;
  result.model = iterate;
  record(iter, empirical_risk(full_ctx, iterate));
  result.wall_time = timer.seconds();
  return result;
}

MetricModel fit_projected(const Dataset& data, const NoiseSpec& noise,
                          const SolverConfig& cfg) {
  validate(cfg);
  validate(noise);
  if (data.num_pairs() == 0) {
    throw DomainError("fit_projected: dataset must be nonempty");
  }
  if (data.dim > 32) {
    throw DomainError("fit_projected: reference solver is guarded to dim <= 32");
  }
  const int d = data.dim;

  MetricModel iterate;
  iterate.m = Matrix::Zero(d, d);
  iterate.tau = 0.0;

  RiskContext ctx{&data, noise};
  MetricGradient grad;
  double lr = cfg.learning_rate;
  int restarts = 0;
  MetricModel last_finite = iterate;

  Eigen::SelfAdjointEigenSolver<Matrix> es;
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const double loss = risk_value_and_gradient_metric(ctx, iterate, &grad);
    const bool finite = std::isfinite(loss) && grad.m.allFinite() &&
                        std::isfinite(grad.tau);
    if (!finite) {
      if (++restarts > kMaxRestarts) {
        throw DivergenceError(
            "fit_projected: loss became non-finite at iteration " +
                std::to_string(iter) + " after " +
                std::to_string(kMaxRestarts) + " learning-rate restarts",
            iter);
      }
      lr *= 0.5;
      iterate = last_finite;
      continue;
    }
    last_finite = iterate;

    Matrix stepped = iterate.m - lr * grad.m;
    es.compute(0.5 * (stepped + stepped.transpose()));
    Vector lam = es.eigenvalues().cwiseMax(0.0);
    MetricModel next;
    next.m = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    next.m = 0.5 * (next.m + next.m.transpose()).eval();
    next.tau = std::max(0.0, iterate.tau - lr * grad.tau);

    const double step_norm =
        ((next.m - iterate.m).norm() + std::fabs(next.tau - iterate.tau)) / lr;
    iterate = next;
    if (step_norm <= cfg.stop_tol) break;
    if ((iter + 1) % cfg.decay_interval == 0) lr *= cfg.decay;
  }
  return iterate;
}

}  // namespace lindml

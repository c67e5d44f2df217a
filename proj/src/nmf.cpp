#include "yieldfactors/nmf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "yieldfactors/error.hpp"
#include "yieldfactors/linalg.hpp"
#include "yieldfactors/random.hpp"

namespace yf {

std::vector<int> normalize_weight_columns(Eigen::MatrixXd& weights, Eigen::MatrixXd& factors) {
  std::vector<int> degenerate;
  for (Eigen::Index a = 0; a < weights.cols(); ++a) {
    const double sum = weights.col(a).sum();
    if (sum > 0.0) {
      weights.col(a) /= sum;
      factors.row(a) *= sum;
    } else {
      weights.col(a).setZero();
      factors.row(a).setZero();
      degenerate.push_back(static_cast<int>(a));
    }
  }
  return degenerate;
}

NmfRun nmf_run(const Eigen::MatrixXd& x, int k, std::uint64_t seed, const NmfOptions& options) {
  const auto n = x.rows();
  const auto t = x.cols();
  if (k < 1 || k > std::min(n, t)) {
    throw ParameterError("nmf_run: k = " + std::to_string(k) + " outside [1, " +
                         std::to_string(std::min(n, t)) + "]");
  }
  if (!x.allFinite()) throw PreconditionError("nmf_run: non-finite entries");
  if ((x.array() < 0.0).any()) throw PreconditionError("nmf_run: negative entries");
  const double data_mean = x.mean();
  if (data_mean == 0.0) throw PreconditionError("nmf_run: all-zero matrix");

  Rng rng(seed);
  Eigen::MatrixXd w(n, k);
  Eigen::MatrixXd f(k, t);
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = uniform_open_closed(rng);
  for (Eigen::Index j = 0; j < f.cols(); ++j)
    for (Eigen::Index i = 0; i < f.rows(); ++i) f(i, j) = uniform_open_closed(rng);
  // Match the initial product's mean to the data mean, split evenly.
  const double scale = std::sqrt(data_mean / (w * f).mean());
  w *= scale;
  f *= scale;

  const double eps = options.epsilon;
  NmfRun run;
  run.seed = seed;
  double previous = (x - w * f).squaredNorm();
  run.objective_trace.push_back(previous);

  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::MatrixXd w_num = x * f.transpose();
    const Eigen::MatrixXd w_den = w * (f * f.transpose());
    w.array() *= w_num.array() / w_den.array().max(eps);

    const Eigen::MatrixXd f_num = w.transpose() * x;
    const Eigen::MatrixXd f_den = (w.transpose() * w) * f;
    f.array() *= f_num.array() / f_den.array().max(eps);

    const double current = (x - w * f).squaredNorm();
    run.objective_trace.push_back(current);
    run.iterations = it + 1;
    if (current == 0.0 || (previous - current) / previous < options.relative_tolerance) break;
    previous = current;
  }

  run.degenerate_factors = normalize_weight_columns(w, f);
  run.objective = (x - w * f).squaredNorm();
  run.weights = std::move(w);
  run.factors = std::move(f);
  return run;
}

Rank1Comparison compare_one_factor_nmf(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw ParameterError("compare_one_factor_nmf: n and m must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(n, m);
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = std::abs(normal(rng));

  Rank1Comparison out;
  const NmfRun run = nmf_run(x, 1, derive_seed(seed, {1}));
  out.nmf_error = run.objective;
  out.svd_error = (x - rank1_truncate(x).product()).squaredNorm();
  return out;
}

}  // namespace yf

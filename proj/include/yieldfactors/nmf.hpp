#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace yf {

struct NmfOptions {
  int max_iterations = 2000;
  // Stop once (previous - current) / previous falls below this.
  double relative_tolerance = 1e-9;
  // Floor applied to multiplicative-update denominators.
  double epsilon = 1e-12;
};

// One factorization X ~ W F. Columns of `weights` sum to 1 and the matching
// rows of `factors` carry the scale.
struct NmfRun {
  Eigen::MatrixXd weights;  // N x K
  Eigen::MatrixXd factors;  // K x T
  double objective = 0.0;   // ||X - W F||_F^2 after normalization
  std::uint64_t seed = 0;
  int iterations = 0;
  std::vector<double> objective_trace;  // initial value, then one per iteration
  std::vector<int> degenerate_factors;  // columns of W that summed to zero
};

// Lee-Seung multiplicative updates for the Frobenius objective, followed by
// column-sum normalization of W. Deterministic in (x, k, seed).
NmfRun nmf_run(const Eigen::MatrixXd& x, int k, std::uint64_t seed, const NmfOptions& options = {});

// Rescales W columns to unit sum and moves the scale into F rows. Columns
// with zero sum are zeroed in both and reported.
std::vector<int> normalize_weight_columns(Eigen::MatrixXd& weights, Eigen::MatrixXd& factors);

struct Rank1Comparison {
  double nmf_error = 0.0;
  double svd_error = 0.0;
};

// One-factor NMF vs. rank-1 SVD truncation on an n x m matrix of absolute
// standard normals drawn from `seed`.
Rank1Comparison compare_one_factor_nmf(int n, int m, std::uint64_t seed);

}  // namespace yf

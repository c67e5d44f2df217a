#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "yieldfactors/ingest.hpp"
#include "yieldfactors/kmeans.hpp"
#include "yieldfactors/nmf.hpp"

namespace yf {

enum class DenoiseMode { none, min_level, max_level };

DenoiseMode parse_denoise_mode(std::string_view text);  // none | min | max
std::string to_string(DenoiseMode mode);

struct DenoisedPanel {
  Eigen::MatrixXd values;                // N x T, >= 0
  std::optional<Eigen::VectorXd> level;  // per-date min or max; empty for none
  DenoiseMode mode = DenoiseMode::none;
};

// min_level: Y - L with L the column minimum. max_level: L - Y with L the
// column maximum. none: Y unchanged.
DenoisedPanel denoise(const YieldPanel& panel, DenoiseMode mode);

// ---------------------------------------------------------------------------
// Ensemble NMF

struct EnsembleOptions {
  NmfOptions nmf;
  bool use_median = false;
  // A batch with this many members or fewer forces k -> k - 1.
  int reduce_threshold = 1;
};

struct EnsembleResult {
  Eigen::MatrixXd weights_mean, weights_sd, weights_median, weights_mad;  // N x K'
  Eigen::MatrixXd factors_mean, factors_sd, factors_median, factors_mad;  // K' x T
  std::vector<int> batch_sizes;                                           // P_A
  int k_effective = 0;
  int k_requested = 0;
  int runs = 0;
  bool use_median = false;
  std::vector<std::string> trace;  // "Trying k = ..." log

  // Mean/SD or median/MAD depending on use_median.
  const Eigen::MatrixXd& weights() const { return use_median ? weights_median : weights_mean; }
  const Eigen::MatrixXd& factors() const { return use_median ? factors_median : factors_mean; }
  const Eigen::MatrixXd& weights_error() const { return use_median ? weights_mad : weights_sd; }
  const Eigen::MatrixXd& factors_error() const { return use_median ? factors_mad : factors_sd; }
};

// P independent NMF runs, columns aligned by k-means on the stacked weights,
// then averaged element by element. Aligned groups are ordered by the
// weight-weighted mean row index of their mean weight column (short end
// first).
EnsembleResult ensemble_nmf(const Eigen::MatrixXd& x, int k, int p_runs, std::uint64_t seed,
                            const EnsembleOptions& options = {});

// R-compatible median absolute deviation (scaled by 1.4826).
double mad(std::vector<double> values);

// ---------------------------------------------------------------------------
// Cluster factor model

struct ClusterFactorModel {
  Clustering clustering;
  Eigen::MatrixXd weights;  // N x K, zero outside each cluster, columns sum to 1
  Eigen::MatrixXd factors;  // K x T
};

// Within each cluster: rank-1 truncation of the cluster's rows, then the
// column-sum normalization of the weights.
ClusterFactorModel cluster_factor_model(const Eigen::MatrixXd& yields, const Clustering& clustering);
ClusterFactorModel cluster_factor_model(const YieldPanel& panel, const Clustering& clustering);

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& factors);

// Row i divided by its sample standard deviation.
Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& rows);
Eigen::MatrixXd normalize_rows(const YieldPanel& panel);

// Non-overlapping windows of `window` dates (trailing remainder dropped),
// each refit with the fixed clustering.
std::vector<ClusterFactorModel> windowed_models(const YieldPanel& panel, const Clustering& clustering, int window);
std::vector<Eigen::MatrixXd> windowed_weights(const YieldPanel& panel, const Clustering& clustering, int window);

struct DailyWeights {
  std::vector<Eigen::MatrixXd> weights;  // T matrices, N x K
  Eigen::MatrixXd scale;                 // K x T multiplier absorbed into the factors
};

// Exact per-date fit Y_is = w_i F_{A(i),s}, renormalized so each column of
// every date's weights sums to 1.
DailyWeights daily_weights(const YieldPanel& panel, const ClusterFactorModel& model);

}  // namespace yf

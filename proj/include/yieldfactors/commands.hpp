#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "yieldfactors/diagnostics.hpp"
#include "yieldfactors/factor_models.hpp"
#include "yieldfactors/ingest.hpp"
#include "yieldfactors/kmeans.hpp"
#include "yieldfactors/linalg.hpp"
#include "yieldfactors/reporting.hpp"

namespace yf {

enum class Command { erank, nmf, cluster, stability, compare_rank1 };

struct RunConfig {
  Command command = Command::erank;
  std::string input_path;
  int k = 2;
  int runs = 100;
  std::optional<int> sets;  // defaults to runs
  DenoiseMode denoise = DenoiseMode::none;
  std::vector<std::string> drop;
  std::uint64_t seed = 0;
  int window = 21;
  bool daily = false;
  bool use_median = false;
  std::filesystem::path out_dir = ".";
  // Unset: 10 Yr, or the de-noising level for a de-noised NMF.
  std::optional<LevelDefinition> level;
  bool plots = true;
  int n = 10;  // compare-rank1 matrix shape
  int m = 20;

  int effective_sets() const { return sets.value_or(runs); }
  void validate() const;  // throws ParameterError
};

struct ReportBundle {
  std::string console;
  std::vector<std::filesystem::path> files;
};

// ---------------------------------------------------------------------------
// Pipelines (no file output)

struct ErankSummary {
  CorrelationMatrix correlation;
  double average_correlation = 0.0;  // percent
  double erank = 0.0;
  double mode_rank = 0.0;
};

ErankSummary erank_summary(const YieldPanel& panel);

struct NmfPipeline {
  std::vector<MaturityLabel> maturities;  // after drops
  DenoisedPanel denoised;                 // full panel
  Eigen::MatrixXd x;                      // factorized matrix, after drops
  EnsembleResult ensemble;
  Eigen::MatrixXd fitted;
  FitReport fit;
  CurveSeries curve;
  Eigen::VectorXd level;  // series the factors are correlated against
  FactorCorrelations correlations;
  Eigen::MatrixXd interpretation;  // K x 3: level, slope, curvature
};

NmfPipeline run_nmf_pipeline(const YieldPanel& panel, const RunConfig& config);

struct ClusterPipeline {
  YieldPanel panel;  // after drops
  Eigen::MatrixXd normalized;
  bool stable = false;
  ModalClustering modal;  // clusters numbered by first appearance
  ClusterFactorModel model;
  FitReport fit;
  CurveSeries curve;
  FactorCorrelations correlations;
  Eigen::MatrixXd interpretation;
  LevelSlopeCurvature lsc;
};

ClusterPipeline run_cluster_pipeline(const YieldPanel& panel, const RunConfig& config);

struct StabilityPipeline {
  ClusterPipeline cluster;
  std::vector<Eigen::MatrixXd> windowed;
  Eigen::MatrixXd window_series;  // N x windows, each maturity's own-cluster weight
  std::optional<DailyWeights> daily;
  Eigen::MatrixXd daily_series;  // N x T when daily is set
};

StabilityPipeline run_stability_pipeline(const YieldPanel& panel, const RunConfig& config);

// Picks W(i, A(i)) out of each period's N x K weights.
Eigen::MatrixXd own_cluster_series(const std::vector<Eigen::MatrixXd>& weights, const Clustering& clustering);

// ---------------------------------------------------------------------------
// Commands (read input, write outputs, return console text)

std::string cmd_erank(const RunConfig& config);
ReportBundle cmd_nmf(const RunConfig& config, Stamper& stamper);
ReportBundle cmd_cluster(const RunConfig& config, Stamper& stamper);
ReportBundle cmd_stability(const RunConfig& config, Stamper& stamper);
std::string cmd_compare_rank1(const RunConfig& config);

}  // namespace yf

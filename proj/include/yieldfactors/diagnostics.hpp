#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "yieldfactors/ingest.hpp"

namespace yf {

// Per-maturity fit of a reconstruction. Correlations are in percent;
// nullopt marks an undefined correlation (constant row).
struct FitReport {
  std::vector<std::optional<double>> correlations;
  std::vector<double> errors;  // sum over dates of squared residuals
};

FitReport fit_report(const Eigen::MatrixXd& data, const Eigen::MatrixXd& fitted);

enum class LevelDefinition { min_yield, max_yield, ten_year };

LevelDefinition parse_level_definition(std::string_view text);  // min | max | 10y

struct CurveSeries {
  Eigen::VectorXd level;
  Eigen::VectorXd slope;      // 10 Yr - 3 Mo
  Eigen::VectorXd curvature;  // 2 * 2 Yr - 10 Yr - 3 Mo
  LevelDefinition level_definition = LevelDefinition::ten_year;
};

CurveSeries curve_series(const YieldPanel& panel, LevelDefinition level_definition);

struct FactorCorrelations {
  Eigen::MatrixXd phi;    // K x K, percent
  Eigen::VectorXd theta;  // factor vs level, percent
};

// Serial correlations among factor rows and of each row with the level.
FactorCorrelations factor_correlations(const Eigen::MatrixXd& factors, const Eigen::VectorXd& level);

// K x 3 correlations (percent) of each factor with level, slope, curvature.
Eigen::MatrixXd interpretation_correlations(const Eigen::MatrixXd& factors, const CurveSeries& series);

// Serial correlation matrix (percent) between the rows of `a` and the rows
// of `b`. Throws DegenerateInputError on a constant row.
Eigen::MatrixXd cross_correlations(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct LevelSlopeCurvature {
  Eigen::Matrix3d correlations;  // percent, order L, S, C
  double erank = 0.0;
};

LevelSlopeCurvature level_slope_curvature_correlations(const CurveSeries& series);

struct NelsonSiegelLoadings {
  double lambda = 0.0;
  std::vector<double> loadings1;  // (1 - exp(-lambda tau)) / (lambda tau)
  std::vector<double> loadings2;  // loadings1 - exp(-lambda tau)
};

// Maturities in years. lambda is per year.
NelsonSiegelLoadings nelson_siegel_loadings(const std::vector<double>& maturities, double lambda);

}  // namespace yf

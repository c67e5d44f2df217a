#include "yieldfactors/diagnostics.hpp"

#include <cmath>
#include <string>

#include "yieldfactors/error.hpp"
#include "yieldfactors/linalg.hpp"

namespace yf {

FitReport fit_report(const Eigen::MatrixXd& data, const Eigen::MatrixXd& fitted) {
  if (data.rows() != fitted.rows() || data.cols() != fitted.cols()) {
    throw ParameterError("fit_report: data and fitted matrices differ in shape");
  }
  FitReport out;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const auto r = pearson(data.row(i).transpose(), fitted.row(i).transpose());
    out.correlations.push_back(r ? std::optional<double>(*r * 100.0) : std::nullopt);
    out.errors.push_back((data.row(i) - fitted.row(i)).squaredNorm());
  }
  return out;
}

LevelDefinition parse_level_definition(std::string_view text) {
  if (text == "min") return LevelDefinition::min_yield;
  if (text == "max") return LevelDefinition::max_yield;
  if (text == "10y" || text == "10Y") return LevelDefinition::ten_year;
  throw ParameterError("unknown level definition '" + std::string(text) + "' (expected min, max or 10y)");
}

CurveSeries curve_series(const YieldPanel& panel, LevelDefinition level_definition) {
  auto row = [&](std::string_view label) {
    const auto i = panel.find(label);
    if (i < 0) throw ParameterError("curve_series: panel has no " + std::string(label) + " maturity");
    return Eigen::VectorXd(panel.yields.row(i).transpose());
  };
  const Eigen::VectorXd m3 = row("3 Mo");
  const Eigen::VectorXd y2 = row("2 Yr");
  const Eigen::VectorXd y10 = row("10 Yr");

  CurveSeries out;
  out.level_definition = level_definition;
  out.slope = y10 - m3;
  out.curvature = 2.0 * y2 - y10 - m3;
  switch (level_definition) {
    case LevelDefinition::min_yield: out.level = panel.yields.colwise().minCoeff().transpose(); break;
    case LevelDefinition::max_yield: out.level = panel.yields.colwise().maxCoeff().transpose(); break;
    case LevelDefinition::ten_year: out.level = y10; break;
  }
  return out;
}

Eigen::MatrixXd cross_correlations(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) throw ParameterError("cross_correlations: series lengths differ");
  if (a.cols() < 2) throw ParameterError("cross_correlations: need at least 2 observations");
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      const auto r = pearson(a.row(i).transpose(), b.row(j).transpose());
      if (!r) throw DegenerateInputError("cross_correlations: constant series");
      out(i, j) = *r * 100.0;
    }
  }
  return out;
}

FactorCorrelations factor_correlations(const Eigen::MatrixXd& factors, const Eigen::VectorXd& level) {
  FactorCorrelations out;
  out.phi = cross_correlations(factors, factors);
  out.phi.diagonal().setConstant(100.0);
  out.theta = cross_correlations(factors, level.transpose()).col(0);
  return out;
}

Eigen::MatrixXd interpretation_correlations(const Eigen::MatrixXd& factors, const CurveSeries& series) {
  Eigen::MatrixXd lsc(3, series.level.size());
  lsc.row(0) = series.level.transpose();
  lsc.row(1) = series.slope.transpose();
  lsc.row(2) = series.curvature.transpose();
  return cross_correlations(factors, lsc);
}

LevelSlopeCurvature level_slope_curvature_correlations(const CurveSeries& series) {
  Eigen::MatrixXd lsc(3, series.level.size());
  lsc.row(0) = series.level.transpose();
  lsc.row(1) = series.slope.transpose();
  lsc.row(2) = series.curvature.transpose();
  LevelSlopeCurvature out;
  out.correlations = cross_correlations(lsc, lsc);
  out.correlations.diagonal().setConstant(100.0);
  out.erank = correlation_erank(out.correlations / 100.0, false);
  return out;
}

NelsonSiegelLoadings nelson_siegel_loadings(const std::vector<double>& maturities, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("nelson_siegel_loadings: lambda must be > 0");
  NelsonSiegelLoadings out;
  out.lambda = lambda;
  for (double tau : maturities) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ParameterError("nelson_siegel_loadings: maturities must be > 0");
    const double x = lambda * tau;
    // -expm1(-x) keeps full precision as x -> 0.
    const double w1 = -std::expm1(-x) / x;
    out.loadings1.push_back(w1);
    out.loadings2.push_back(w1 - std::exp(-x));
  }
  return out;
}

}  // namespace yf

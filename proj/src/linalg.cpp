#include "yieldfactors/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>

#include "yieldfactors/error.hpp"

namespace yf {

std::optional<double> pearson(const Eigen::Ref<const Eigen::VectorXd>& a,
                              const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw ParameterError("pearson: length mismatch");
  if (a.size() < 2) return std::nullopt;
  const Eigen::VectorXd da = a.array() - a.mean();
  const Eigen::VectorXd db = b.array() - b.mean();
  const double saa = da.squaredNorm();
  const double sbb = db.squaredNorm();
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  const double r = da.dot(db) / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() < 2) return 0.0;
  const double mean = x.mean();
  return std::sqrt((x.array() - mean).square().sum() / static_cast<double>(x.size() - 1));
}

double CorrelationMatrix::average_offdiagonal() const {
  const auto n = entries.rows();
  if (n < 2) return 0.0;
  return (entries.sum() - entries.trace()) / static_cast<double>(n * (n - 1));
}

CorrelationMatrix serial_correlation(const Eigen::MatrixXd& rows, std::vector<std::string> labels) {
  if (rows.cols() < 2) throw ParameterError("serial_correlation: need at least 2 observations");
  const auto n = rows.rows();
  Eigen::MatrixXd centered = rows.colwise() - rows.rowwise().mean();
  Eigen::VectorXd norms = centered.rowwise().norm();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (norms(i) == 0.0) {
      const std::string name = i < static_cast<Eigen::Index>(labels.size())
                                   ? labels[static_cast<std::size_t>(i)]
                                   : "row " + std::to_string(i + 1);
      throw DegenerateInputError("serial_correlation: " + name + " has zero variance");
    }
    centered.row(i) /= norms(i);
  }
  CorrelationMatrix out;
  out.entries = centered * centered.transpose();
  out.entries = (0.5 * (out.entries + out.entries.transpose())).cwiseMax(-1.0).cwiseMin(1.0);
  out.entries.diagonal().setOnes();
  out.labels = std::move(labels);
  return out;
}

SymEigen sym_eigen(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ParameterError("sym_eigen: matrix is not square");
  if (!m.allFinite()) throw NumericError("sym_eigen: non-finite entries");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw ParameterError("sym_eigen: matrix is not symmetric");
  }
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericError("sym_eigen: solver did not converge");

  // Eigen returns ascending order.
  SymEigen out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

double erank(std::span<const double> eigenvalues, bool exclude_first) {
  std::vector<double> x;
  x.reserve(eigenvalues.size());
  for (double v : eigenvalues) {
    if (!std::isfinite(v)) throw NumericError("erank: non-finite eigenvalue");
    if (v > 0.0) x.push_back(v);
  }
  std::sort(x.begin(), x.end(), std::greater<>());
  if (exclude_first && !x.empty()) x.erase(x.begin());
  if (x.empty()) throw DegenerateInputError("erank: no positive eigenvalues");

  double total = 0.0;
  for (double v : x) total += v;
  double entropy = 0.0;
  for (double v : x) {
    const double p = v / total;
    entropy -= p * std::log(p);
  }
  return std::exp(entropy) + (exclude_first ? 1.0 : 0.0);
}

double erank(const Eigen::VectorXd& eigenvalues, bool exclude_first) {
  return erank(std::span<const double>(eigenvalues.data(), static_cast<std::size_t>(eigenvalues.size())),
               exclude_first);
}

double correlation_erank(const Eigen::MatrixXd& correlation, bool exclude_first) {
  return erank(sym_eigen(correlation).values, exclude_first);
}

Rank1 rank1_truncate(const Eigen::MatrixXd& a) {
  if (a.size() == 0) throw ParameterError("rank1_truncate: empty matrix");
  if (!(a.array() > 0.0).all()) {
    throw PreconditionError("rank1_truncate: matrix must be strictly positive");
  }
  const SymEigen left = sym_eigen(a * a.transpose());
  const SymEigen right = sym_eigen(a.transpose() * a);
  Rank1 out;
  out.col = std::sqrt(std::max(left.values(0), 0.0)) * left.vectors.col(0).cwiseAbs();
  out.row = right.vectors.col(0).cwiseAbs();
  return out;
}

}  // namespace yf

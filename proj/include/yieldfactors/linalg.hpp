#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace yf {

// Pearson correlation of two equal-length series, or nullopt when either
// has zero variance.
std::optional<double> pearson(const Eigen::Ref<const Eigen::VectorXd>& a,
                              const Eigen::Ref<const Eigen::VectorXd>& b);

// Sample (n - 1) standard deviation.
double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& x);

struct CorrelationMatrix {
  Eigen::MatrixXd entries;  // unit diagonal, symmetric
  std::vector<std::string> labels;

  // Mean of the N(N-1) off-diagonal entries.
  double average_offdiagonal() const;
};

// Serial (across columns) correlation between every pair of rows.
// Throws DegenerateInputError naming the first constant row.
CorrelationMatrix serial_correlation(const Eigen::MatrixXd& rows,
                                     std::vector<std::string> labels = {});

struct SymEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // column j pairs with values(j)
};

// Full eigendecomposition of a symmetric matrix (symmetrized by averaging
// with its transpose first).
SymEigen sym_eigen(const Eigen::MatrixXd& m);

// exp of the spectral entropy of the positive part of `eigenvalues`.
// With exclude_first the largest eigenvalue is removed first and 1 is added
// back (the mode-adjusted rank).
double erank(std::span<const double> eigenvalues, bool exclude_first);
double erank(const Eigen::VectorXd& eigenvalues, bool exclude_first);

// Convenience: erank of the spectrum of a correlation matrix.
double correlation_erank(const Eigen::MatrixXd& correlation, bool exclude_first);

struct Rank1 {
  Eigen::VectorXd col;  // sqrt(lambda) * |u|
  Eigen::VectorXd row;  // |v|, unit norm

  Eigen::MatrixXd product() const { return col * row.transpose(); }
};

// Frobenius-optimal rank-1 approximation of a strictly positive matrix.
// u and v are the top eigenvectors of A A^T and A^T A; by Perron-Frobenius
// both can be taken entrywise positive.
Rank1 rank1_truncate(const Eigen::MatrixXd& a);

}  // namespace yf

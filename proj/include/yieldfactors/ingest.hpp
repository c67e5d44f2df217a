#pragma once

#include <chrono>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace yf {

// One Treasury constant-maturity tenor.
struct MaturityLabel {
  std::string label;  // canonical spelling, e.g. "3 Mo", "10 Yr"
  int months = 0;

  double years() const { return months / 12.0; }
  friend bool operator==(const MaturityLabel&, const MaturityLabel&) = default;
};

// The 12 tenors of the daily Treasury par yield curve, shortest first.
std::span<const MaturityLabel> canonical_maturities();

// Case-insensitive lookup after collapsing whitespace ("10  yr" -> "10 Yr").
// Throws NotFoundError for an unknown label.
MaturityLabel parse_maturity_label(std::string_view text);

using Date = std::chrono::year_month_day;

// MM/DD/YY (two-digit years pivot to 20YY) or MM/DD/YYYY.
Date parse_date(std::string_view text);
std::string format_date(const Date& date);  // MM/DD/YY

// Yields in percent. Rows are maturities, columns are dates.
struct YieldPanel {
  Eigen::MatrixXd yields;
  std::vector<MaturityLabel> maturities;
  std::vector<Date> dates;

  Eigen::Index rows() const { return yields.rows(); }
  Eigen::Index cols() const { return yields.cols(); }

  // Row index of `label`, or -1.
  Eigen::Index find(std::string_view label) const;
  std::vector<std::string> labels() const;
};

// Reads the tab-delimited treasury.txt layout: header "Date" + 12 maturity
// labels, then one row per date. Any row containing "N/A" is dropped whole.
YieldPanel parse_treasury_tsv(std::istream& in);
YieldPanel read_treasury_file(const std::string& path);

// Writes the treasury.txt layout with shortest round-trip precision, so a
// parsed panel re-parses to an identical one.
void write_treasury_tsv(const YieldPanel& panel, std::ostream& out);

YieldPanel drop_maturity(const YieldPanel& panel, std::string_view label);

}  // namespace yf

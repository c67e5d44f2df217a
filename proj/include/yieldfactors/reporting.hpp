#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "yieldfactors/diagnostics.hpp"
#include "yieldfactors/ingest.hpp"

namespace yf {

// Produces YYYY-MM-DD.HHMMSS stamps for output file names. Successive stamps
// from one Stamper are strictly increasing even within the same second.
class Stamper {
 public:
  using Clock = std::function<std::chrono::system_clock::time_point()>;

  explicit Stamper(Clock clock = [] { return std::chrono::system_clock::now(); }, bool utc = false);

  std::string next();

 private:
  Clock clock_;
  bool utc_;
  std::optional<std::chrono::sys_seconds> last_;
};

std::string format_stamp(std::chrono::sys_seconds t, bool utc);

// Round half-way cases on the exact binary value, like R's round(x, digits).
double round_to(double x, int digits);

// Shortest decimal rendering with at most 15 significant digits, choosing
// fixed or scientific notation by width as R's as.character does
// (0.000145, 5.1e-05, 1e+05). NaN renders as "NA".
std::string format_r_number(double x);

// Where a command's outputs go and how they are named.
struct OutputTarget {
  std::filesystem::path dir;
  int k = 0;
  int runs = 0;
  std::string stamp;
};

// Rows: label, K means (percent, 2 dp), then K error columns when `sd` is
// given (percent, 6 dp if high_precision_sd else 2 dp).
std::string format_weights_table(const Eigen::MatrixXd& mean, const Eigen::MatrixXd* sd,
                                 const std::vector<std::string>& labels, bool high_precision_sd);

// Rows: label, rho (percent, 2 dp, "NA" if undefined), E (2 dp).
std::string format_fit_table(const FitReport& report, const std::vector<std::string>& labels);

// w.<k>.<runs>.<stamp>.txt
std::filesystem::path write_weights(const Eigen::MatrixXd& mean, const Eigen::MatrixXd* sd,
                                    const std::vector<std::string>& labels, const OutputTarget& target,
                                    bool high_precision_sd);

// rss.<k>.<runs>.<stamp>.txt
std::filesystem::path write_fit(const FitReport& report, const std::vector<std::string>& labels,
                                const OutputTarget& target);

std::filesystem::path write_text_file(const std::filesystem::path& path, const std::string& contents);

// Line-series SVG document, 1800 x 1800 user units.
struct PlotSeries {
  std::vector<double> y;
  std::string color;
  bool dotted = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<PlotSeries> series;
};

std::string render_svg(const Plot& plot);

// Colors cycle green, red, blue, black.
const std::string& series_color(std::size_t index);

// Factor.<j>.<stamp>.svg: solid mean, dotted +-1 error bands when given.
std::vector<std::filesystem::path> emit_factor_plots(const Eigen::MatrixXd& factors, const Eigen::MatrixXd* errors,
                                                     const OutputTarget& target);

// Weights.<j>.<stamp>.svg against log(maturity in months).
std::vector<std::filesystem::path> emit_weight_plots(const Eigen::MatrixXd& weights, const Eigen::MatrixXd* errors,
                                                     const std::vector<MaturityLabel>& maturities,
                                                     const OutputTarget& target);

// One plot per cluster, one line per member maturity, x = period index.
// `series` is N x periods: each maturity's weight in its own cluster.
std::vector<std::filesystem::path> emit_trajectory_plots(const Eigen::MatrixXd& series,
                                                         const std::vector<int>& assignment,
                                                         const std::string& prefix, const std::string& x_label,
                                                         const OutputTarget& target);

// Rows: label, 1-based cluster, then one weight (percent, 2 dp) per period.
std::string format_series_table(const Eigen::MatrixXd& series, const std::vector<int>& assignment,
                                const std::vector<std::string>& labels);

}  // namespace yf

#include "yieldfactors/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <tuple>

#include "yieldfactors/error.hpp"

namespace yf {

Stamper::Stamper(Clock clock, bool utc) : clock_(std::move(clock)), utc_(utc) {}

std::string Stamper::next() {
  auto t = std::chrono::floor<std::chrono::seconds>(clock_());
  if (last_ && t <= *last_) t = *last_ + std::chrono::seconds(1);
  last_ = t;
  return format_stamp(t, utc_);
}

std::string format_stamp(std::chrono::sys_seconds t, bool utc) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  if (utc) {
    gmtime_r(&tt, &tm);
  } else {
    localtime_r(&tt, &tm);
  }
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%d.%H%M%S", &tm);
  return buf;
}

double round_to(double x, int digits) {
  if (!std::isfinite(x)) return x;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

std::string format_r_number(double x) {
  if (std::isnan(x)) return "NA";
  if (std::isinf(x)) return x > 0 ? "Inf" : "-Inf";
  if (x == 0.0) return "0";

  // 15 significant digits, then drop trailing zeros of the mantissa.
  char sci[64];
  std::snprintf(sci, sizeof sci, "%.14e", x);
  const std::string s(sci);
  const auto epos = s.find('e');
  const int exponent = std::atoi(s.c_str() + epos + 1);
  std::string mantissa = s.substr(0, epos);
  const bool negative = mantissa[0] == '-';
  if (negative) mantissa.erase(0, 1);
  std::string digits;
  for (char c : mantissa) {
    if (c != '.') digits.push_back(c);
  }
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
  const int nsig = static_cast<int>(digits.size());

  const int decimals = std::max(0, nsig - 1 - exponent);
  char fixed[512];
  std::snprintf(fixed, sizeof fixed, "%.*f", decimals, x);

  std::string scientific = negative ? "-" : "";
  scientific += digits[0];
  if (nsig > 1) {
    scientific += '.';
    scientific += digits.substr(1);
  }
  char exp_buf[16];
  std::snprintf(exp_buf, sizeof exp_buf, "e%c%02d", exponent < 0 ? '-' : '+', std::abs(exponent));
  scientific += exp_buf;

  const std::string fixed_str(fixed);
  return fixed_str.size() <= scientific.size() ? fixed_str : scientific;
}

namespace {

std::string cell(double x, int digits) { return format_r_number(round_to(x, digits)); }

std::filesystem::path output_path(const OutputTarget& target, const std::string& name) {
  return target.dir.empty() ? std::filesystem::path(name) : target.dir / name;
}

}  // namespace

std::string format_weights_table(const Eigen::MatrixXd& mean, const Eigen::MatrixXd* sd,
                                 const std::vector<std::string>& labels, bool high_precision_sd) {
  if (static_cast<Eigen::Index>(labels.size()) != mean.rows()) {
    throw ParameterError("format_weights_table: label count does not match weight rows");
  }
  if (sd && (sd->rows() != mean.rows() || sd->cols() != mean.cols())) {
    throw ParameterError("format_weights_table: error matrix shape differs from weights");
  }
  std::ostringstream out;
  for (Eigen::Index i = 0; i < mean.rows(); ++i) {
    out << labels[i];
    for (Eigen::Index j = 0; j < mean.cols(); ++j) out << '\t' << cell(100.0 * mean(i, j), 2);
    if (sd) {
      for (Eigen::Index j = 0; j < sd->cols(); ++j) {
        out << '\t' << cell(100.0 * (*sd)(i, j), high_precision_sd ? 6 : 2);
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string format_fit_table(const FitReport& report, const std::vector<std::string>& labels) {
  if (labels.size() != report.correlations.size() || labels.size() != report.errors.size()) {
    throw ParameterError("format_fit_table: label count does not match report rows");
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& rho = report.correlations[i];
    out << labels[i] << '\t' << (rho ? cell(*rho, 2) : std::string("NA")) << '\t' << cell(report.errors[i], 2)
        << '\n';
  }
  return out.str();
}

std::filesystem::path write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
  return path;
}

std::filesystem::path write_weights(const Eigen::MatrixXd& mean, const Eigen::MatrixXd* sd,
                                    const std::vector<std::string>& labels, const OutputTarget& target,
                                    bool high_precision_sd) {
  const std::string name =
      "w." + std::to_string(target.k) + "." + std::to_string(target.runs) + "." + target.stamp + ".txt";
  return write_text_file(output_path(target, name), format_weights_table(mean, sd, labels, high_precision_sd));
}

std::filesystem::path write_fit(const FitReport& report, const std::vector<std::string>& labels,
                                const OutputTarget& target) {
  const std::string name =
      "rss." + std::to_string(target.k) + "." + std::to_string(target.runs) + "." + target.stamp + ".txt";
  return write_text_file(output_path(target, name), format_fit_table(report, labels));
}

// ---------------------------------------------------------------------------
// SVG

const std::string& series_color(std::size_t index) {
  static const std::string colors[] = {"green", "red", "blue", "black"};
  return colors[index % 4];
}

namespace {

constexpr double kSize = 1800.0;
constexpr double kLeft = 220.0;
constexpr double kRight = 80.0;
constexpr double kTop = 140.0;
constexpr double kBottom = 200.0;

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::pair<double, double> padded_range(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0};
  if (hi - lo < 1e-12) {
    const double pad = std::max(1e-6, std::abs(lo) * 0.05);
    return {lo - pad, hi + pad};
  }
  const double pad = 0.04 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

std::string render_svg(const Plot& plot) {
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (double x : plot.x) {
    xlo = std::min(xlo, x);
    xhi = std::max(xhi, x);
  }
  for (const auto& s : plot.series) {
    if (s.y.size() != plot.x.size()) throw ParameterError("render_svg: series length differs from x");
    for (double y : s.y) {
      if (!std::isfinite(y)) continue;
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  std::tie(xlo, xhi) = padded_range(xlo, xhi);
  std::tie(ylo, yhi) = padded_range(ylo, yhi);

  const double w = kSize - kLeft - kRight;
  const double h = kSize - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xlo) / (xhi - xlo) * w; };
  auto py = [&](double y) { return kTop + (yhi - y) / (yhi - ylo) * h; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kSize / 2) << "\" y=\"80\" font-size=\"48\" text-anchor=\"middle\">"
      << escape_xml(plot.title) << "</text>\n";
  out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";

  constexpr int kTicks = 5;
  for (int t = 0; t <= kTicks; ++t) {
    const double xv = xlo + (xhi - xlo) * t / kTicks;
    const double yv = ylo + (yhi - ylo) * t / kTicks;
    out << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << num(kTop + h) << "\" x2=\"" << num(px(xv)) << "\" y2=\""
        << num(kTop + h + 15) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kTop + h + 55) << "\" font-size=\"32\" text-anchor=\"middle\">"
        << tick_label(xv) << "</text>\n";
    out << "<line x1=\"" << num(kLeft - 15) << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << num(kLeft) << "\" y2=\""
        << num(py(yv)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(kLeft - 25) << "\" y=\"" << num(py(yv) + 10)
        << "\" font-size=\"32\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + w / 2) << "\" y=\"" << num(kSize - 60)
      << "\" font-size=\"40\" text-anchor=\"middle\">" << escape_xml(plot.x_label) << "</text>\n";
  out << "<text x=\"60\" y=\"" << num(kTop + h / 2) << "\" font-size=\"40\" text-anchor=\"middle\" transform=\"rotate(-90 60 "
      << num(kTop + h / 2) << ")\">" << escape_xml(plot.y_label) << "</text>\n";

  for (const auto& s : plot.series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << (s.dotted ? 2 : 3) << '"';
    if (s.dotted) out << " stroke-dasharray=\"3,9\"";
    out << " points=\"";
    bool first = true;
    for (std::size_t i = 0; i < plot.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      if (!first) out << ' ';
      out << num(px(plot.x[i])) << ',' << num(py(s.y[i]));
      first = false;
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

namespace {

std::vector<double> row_of(const Eigen::MatrixXd& m, Eigen::Index r) {
  std::vector<double> v(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) v[c] = m(r, c);
  return v;
}

std::vector<double> col_of(const Eigen::MatrixXd& m, Eigen::Index c) {
  std::vector<double> v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) v[r] = m(r, c);
  return v;
}

void add_with_bands(Plot& plot, std::vector<double> mean, const std::vector<double>* err, const std::string& color) {
  if (err) {
    std::vector<double> lo(mean.size()), hi(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) {
      lo[i] = mean[i] - (*err)[i];
      hi[i] = mean[i] + (*err)[i];
    }
    plot.series.push_back({std::move(lo), color, true});
    plot.series.push_back({std::move(hi), color, true});
  }
  plot.series.push_back({std::move(mean), color, false});
}

}  // namespace

std::vector<std::filesystem::path> emit_factor_plots(const Eigen::MatrixXd& factors, const Eigen::MatrixXd* errors,
                                                     const OutputTarget& target) {
  std::vector<std::filesystem::path> written;
  for (Eigen::Index j = 0; j < factors.rows(); ++j) {
    Plot plot;
    plot.title = "Factor " + std::to_string(j + 1);
    plot.x_label = "Date index";
    plot.y_label = "Factor";
    for (Eigen::Index t = 0; t < factors.cols(); ++t) plot.x.push_back(static_cast<double>(t + 1));
    std::vector<double> err;
    if (errors) err = row_of(*errors, j);
    add_with_bands(plot, row_of(factors, j), errors ? &err : nullptr, series_color(static_cast<std::size_t>(j)));
    const auto name = "Factor." + std::to_string(j + 1) + "." + target.stamp + ".svg";
    written.push_back(write_text_file(output_path(target, name), render_svg(plot)));
  }
  return written;
}

std::vector<std::filesystem::path> emit_weight_plots(const Eigen::MatrixXd& weights, const Eigen::MatrixXd* errors,
                                                     const std::vector<MaturityLabel>& maturities,
                                                     const OutputTarget& target) {
  if (static_cast<Eigen::Index>(maturities.size()) != weights.rows()) {
    throw ParameterError("emit_weight_plots: maturity count does not match weight rows");
  }
  std::vector<std::filesystem::path> written;
  for (Eigen::Index j = 0; j < weights.cols(); ++j) {
    Plot plot;
    plot.title = "Weights " + std::to_string(j + 1);
    plot.x_label = "log(maturity in months)";
    plot.y_label = "Weight";
    for (const auto& m : maturities) plot.x.push_back(std::log(static_cast<double>(m.months)));
    std::vector<double> err;
    if (errors) err = col_of(*errors, j);
    add_with_bands(plot, col_of(weights, j), errors ? &err : nullptr, series_color(static_cast<std::size_t>(j)));
    const auto name = "Weights." + std::to_string(j + 1) + "." + target.stamp + ".svg";
    written.push_back(write_text_file(output_path(target, name), render_svg(plot)));
  }
  return written;
}

std::vector<std::filesystem::path> emit_trajectory_plots(const Eigen::MatrixXd& series,
                                                         const std::vector<int>& assignment,
                                                         const std::string& prefix, const std::string& x_label,
                                                         const OutputTarget& target) {
  if (static_cast<Eigen::Index>(assignment.size()) != series.rows()) {
    throw ParameterError("emit_trajectory_plots: assignment length does not match series rows");
  }
  const int k = assignment.empty() ? 0 : *std::max_element(assignment.begin(), assignment.end()) + 1;
  std::vector<std::filesystem::path> written;
  for (int a = 0; a < k; ++a) {
    Plot plot;
    plot.title = prefix + " " + std::to_string(a + 1);
    plot.x_label = x_label;
    plot.y_label = "Weight";
    for (Eigen::Index t = 0; t < series.cols(); ++t) plot.x.push_back(static_cast<double>(t + 1));
    std::size_t line = 0;
    for (Eigen::Index i = 0; i < series.rows(); ++i) {
      if (assignment[i] != a) continue;
      plot.series.push_back({row_of(series, i), series_color(line++), false});
    }
    if (plot.series.empty()) continue;
    const auto name = prefix + "." + std::to_string(a + 1) + "." + target.stamp + ".svg";
    written.push_back(write_text_file(output_path(target, name), render_svg(plot)));
  }
  return written;
}

std::string format_series_table(const Eigen::MatrixXd& series, const std::vector<int>& assignment,
                                const std::vector<std::string>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != series.rows() || assignment.size() != labels.size()) {
    throw ParameterError("format_series_table: row counts differ");
  }
  std::ostringstream out;
  for (Eigen::Index i = 0; i < series.rows(); ++i) {
    out << labels[i] << '\t' << assignment[i] + 1;
    for (Eigen::Index t = 0; t < series.cols(); ++t) out << '\t' << cell(100.0 * series(i, t), 2);
    out << '\n';
  }
  return out.str();
}

}  // namespace yf

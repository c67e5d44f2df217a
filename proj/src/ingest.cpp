#include "yieldfactors/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "yieldfactors/error.hpp"

namespace yf {
namespace {

const std::array<MaturityLabel, 12> kCanonical = {{
    {"1 Mo", 1},
    {"2 Mo", 2},
    {"3 Mo", 3},
    {"6 Mo", 6},
    {"1 Yr", 12},
    {"2 Yr", 24},
    {"3 Yr", 36},
    {"5 Yr", 60},
    {"7 Yr", 84},
    {"10 Yr", 120},
    {"20 Yr", 240},
    {"30 Yr", 360},
}};

std::string_view trim(std::string_view s) {
  auto issp = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && issp(s.front())) s.remove_prefix(1);
  while (!s.empty() && issp(s.back())) s.remove_suffix(1);
  return s;
}

// Lower-cased, runs of whitespace collapsed to one space, ends trimmed.
std::string normalize(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : trim(s)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string where(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

std::span<const MaturityLabel> canonical_maturities() { return kCanonical; }

MaturityLabel parse_maturity_label(std::string_view text) {
  const std::string key = normalize(text);
  for (const auto& m : kCanonical) {
    if (normalize(m.label) == key) return m;
  }
  throw NotFoundError("unknown maturity label '" + std::string(text) + "'");
}

Date parse_date(std::string_view text) {
  text = trim(text);
  const auto first = text.find('/');
  const auto second = first == std::string_view::npos ? first : text.find('/', first + 1);
  int month = 0, day = 0, year = 0;
  if (second == std::string_view::npos || !parse_int(text.substr(0, first), month) ||
      !parse_int(text.substr(first + 1, second - first - 1), day)) {
    throw ParseError("malformed date '" + std::string(text) + "'");
  }
  const auto year_text = text.substr(second + 1);
  if (!parse_int(year_text, year) || (year_text.size() != 2 && year_text.size() != 4)) {
    throw ParseError("malformed date '" + std::string(text) + "'");
  }
  if (year_text.size() == 2) year += 2000;
  const Date date{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                  std::chrono::day{static_cast<unsigned>(day)}};
  if (!date.ok()) throw ParseError("invalid calendar date '" + std::string(text) + "'");
  return date;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02u/%02u/%02d", static_cast<unsigned>(date.month()),
                static_cast<unsigned>(date.day()), static_cast<int>(date.year()) % 100);
  return buf;
}

Eigen::Index YieldPanel::find(std::string_view label) const {
  const std::string key = normalize(label);
  for (std::size_t i = 0; i < maturities.size(); ++i) {
    if (normalize(maturities[i].label) == key) return static_cast<Eigen::Index>(i);
  }
  return -1;
}

std::vector<std::string> YieldPanel::labels() const {
  std::vector<std::string> out;
  out.reserve(maturities.size());
  for (const auto& m : maturities) out.push_back(m.label);
  return out;
}

YieldPanel parse_treasury_tsv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  // Header.
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw EmptyDataError("input is empty");

  const auto header = split_tabs(line);
  const std::size_t expected = kCanonical.size() + 1;
  if (header.size() != expected) {
    throw ParseError("header has " + std::to_string(header.size()) + " columns, expected " +
                     std::to_string(expected) + (header.size() < expected
                                                     ? " (missing column " + std::to_string(header.size() + 1) + ")"
                                                     : " (unexpected column " + std::to_string(expected + 1) + ")"));
  }
  if (normalize(header[0]) != "date") {
    throw ParseError("header column 1 is '" + std::string(header[0]) + "', expected 'Date'");
  }
  for (std::size_t j = 0; j < kCanonical.size(); ++j) {
    if (normalize(header[j + 1]) != normalize(kCanonical[j].label)) {
      throw ParseError("header column " + std::to_string(j + 2) + " is '" + std::string(header[j + 1]) +
                       "', expected '" + kCanonical[j].label + "'");
    }
  }

  std::vector<Date> dates;
  std::vector<std::array<double, 12>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_tabs(line);
    if (cells.size() != expected) {
      throw ParseError(where(line_no, cells.size()) + ": row has " + std::to_string(cells.size()) +
                       " columns, expected " + std::to_string(expected));
    }
    Date date;
    try {
      date = parse_date(cells[0]);
    } catch (const ParseError& e) {
      throw ParseError(where(line_no, 1) + ": " + e.what());
    }

    std::array<double, 12> values{};
    bool missing = false;
    for (std::size_t j = 0; j < kCanonical.size(); ++j) {
      const auto cell = trim(cells[j + 1]);
      if (cell == "N/A") {
        missing = true;
        continue;
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ParseError(where(line_no, j + 2) + ": non-numeric value '" + std::string(cell) + "'");
      }
      if (v < 0.0) {
        throw ParseError(where(line_no, j + 2) + ": negative yield " + std::string(cell));
      }
      values[j] = v;
    }
    if (missing) continue;
    if (!dates.empty() && !(dates.back() < date)) {
      throw ParseError(where(line_no, 1) + ": date " + format_date(date) + " does not follow " +
                       format_date(dates.back()));
    }
    dates.push_back(date);
    rows.push_back(values);
  }
  if (rows.empty()) throw EmptyDataError("no complete date rows in input");

  YieldPanel panel;
  panel.maturities.assign(kCanonical.begin(), kCanonical.end());
  panel.dates = std::move(dates);
  panel.yields.resize(static_cast<Eigen::Index>(kCanonical.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t s = 0; s < rows.size(); ++s) {
    for (std::size_t i = 0; i < kCanonical.size(); ++i) {
      panel.yields(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) = rows[s][i];
    }
  }
  return panel;
}

YieldPanel read_treasury_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_treasury_tsv(in);
}

void write_treasury_tsv(const YieldPanel& panel, std::ostream& out) {
  out << "Date";
  for (const auto& m : panel.maturities) out << '\t' << m.label;
  out << '\n';
  char buf[64];
  for (Eigen::Index s = 0; s < panel.cols(); ++s) {
    out << format_date(panel.dates[static_cast<std::size_t>(s)]);
    for (Eigen::Index i = 0; i < panel.rows(); ++i) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, panel.yields(i, s));
      out << '\t' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

YieldPanel drop_maturity(const YieldPanel& panel, std::string_view label) {
  const auto row = panel.find(label);
  if (row < 0) throw NotFoundError("maturity '" + std::string(label) + "' not in panel");

  YieldPanel out;
  out.dates = panel.dates;
  out.maturities = panel.maturities;
  out.maturities.erase(out.maturities.begin() + row);
  out.yields.resize(panel.rows() - 1, panel.cols());
  out.yields.topRows(row) = panel.yields.topRows(row);
  out.yields.bottomRows(panel.rows() - row - 1) = panel.yields.bottomRows(panel.rows() - row - 1);
  return out;
}

}  // namespace yf

#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tailcross/errors.hpp"

namespace tailcross {

/// One experiment result.  `estimate` serializes as the sentinel string
/// "non-positive" for non-positive CTE verdicts; the carried max then goes
/// into the `carried` column so the round trip is lossless.
struct ResultRow {
  std::string scenario;
  double param = 0.0;  // xi_max, model parameter, or threshold
  std::size_t repeat_index = 0;
  std::string method;     // pot | cte | ncte
  std::string estimator;  // pickands | dedh
  bool non_positive = false;
  double estimate = 0.0;  // estimate, or carried max when non_positive
  std::optional<double> ground_truth;
  std::optional<double> mse;
  std::size_t degenerate_count = 0;
};

inline const char* result_csv_header() {
  return "scenario,param,repeat,method,estimator,estimate,carried,"
         "ground_truth,mse,degenerate_count";
}

namespace detail {

inline std::string format_real(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_real(const std::string& s, std::size_t line_no) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw parse_error("line " + std::to_string(line_no) +
                          ": expected a real, got '" + s + "'",
                      line_no);
  }
  if (pos != s.size())
    throw parse_error("line " + std::to_string(line_no) +
                          ": trailing characters in '" + s + "'",
                      line_no);
  return v;
}

}  // namespace detail

inline void write_result_row(std::ostream& os, const ResultRow& row) {
  os << row.scenario << ',' << detail::format_real(row.param) << ','
     << row.repeat_index << ',' << row.method << ',' << row.estimator << ',';
  if (row.non_positive)
    os << "non-positive," << detail::format_real(row.estimate);
  else
    os << detail::format_real(row.estimate) << ',';
  os << ',';
  if (row.ground_truth) os << detail::format_real(*row.ground_truth);
  os << ',';
  if (row.mse) os << detail::format_real(*row.mse);
  os << ',' << row.degenerate_count << '\n';
}

inline void write_result_csv(std::ostream& os,
                             const std::vector<ResultRow>& rows) {
  os << result_csv_header() << '\n';
  for (const auto& row : rows) write_result_row(os, row);
}

inline std::vector<ResultRow> read_result_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != result_csv_header())
    throw parse_error("missing or malformed result header", 1);
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = detail::split_fields(line);
    if (f.size() != 10)
      throw parse_error("line " + std::to_string(line_no) +
                            ": expected 10 columns",
                        line_no);
    ResultRow row;
    row.scenario = f[0];
    row.param = detail::parse_real(f[1], line_no);
    row.repeat_index =
        static_cast<std::size_t>(detail::parse_real(f[2], line_no));
    row.method = f[3];
    row.estimator = f[4];
    if (f[5] == "non-positive") {
      row.non_positive = true;
      row.estimate = detail::parse_real(f[6], line_no);
    } else {
      row.estimate = detail::parse_real(f[5], line_no);
      if (!f[6].empty())
        throw parse_error("line " + std::to_string(line_no) +
                              ": carried value on a positive row",
                          line_no);
    }
    if (!f[7].empty()) row.ground_truth = detail::parse_real(f[7], line_no);
    if (!f[8].empty()) row.mse = detail::parse_real(f[8], line_no);
    row.degenerate_count =
        static_cast<std::size_t>(detail::parse_real(f[9], line_no));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Reads a one-column (value) or two-column (group-id,value) samples CSV.
/// Returns pairs of (group id, value); one-column input maps to group 0.
inline std::vector<std::pair<std::size_t, double>> read_samples_csv(
    std::istream& is) {
  std::vector<std::pair<std::size_t, double>> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = detail::split_fields(line);
    if (columns == 0) columns = f.size();
    if (f.size() != columns || columns > 2)
      throw parse_error("line " + std::to_string(line_no) +
                            ": inconsistent column count",
                        line_no);
    if (columns == 1) {
      out.emplace_back(0, detail::parse_real(f[0], line_no));
    } else {
      out.emplace_back(
          static_cast<std::size_t>(detail::parse_real(f[0], line_no)),
          detail::parse_real(f[1], line_no));
    }
  }
  if (out.empty()) throw parse_error("empty samples file", line_no);
  return out;
}

}  // namespace tailcross

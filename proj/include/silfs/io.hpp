#pragma once

// CSV ingest and emission. A dataset file has a header row whose first
// column is "y"; the remaining columns form the design matrix.

#include "silfs/core.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace silfs {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Formats a double with 17 significant digits so that parsing it back
/// yields the same value.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Parses a dataset from CSV text. Data rows are numbered from 1 in error
/// messages; columns are named by their header.
inline Dataset parse_dataset_csv(std::istream& in, const std::string& source = "<input>") {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  std::vector<std::string> header = detail::split_csv_line(line);
  for (auto& h : header) h = detail::trim(h);
  if (header.empty() || header.front() != "y") {
    throw DataError(source + ": first column must be named \"y\"");
  }
  if (header.size() < 2) throw DataError(source + ": no design columns after \"y\"");

  std::vector<std::vector<double>> rows;
  Index row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError(source + ": row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    }
    std::vector<double> values(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string text = detail::trim(cells[c]);
      const std::string where = "row " + std::to_string(row) + ", col \"" + header[c] + "\"";
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(text.c_str(), &end);
      if (text.empty() || end != text.c_str() + text.size()) {
        throw DataError(source + ": cannot parse \"" + text + "\" at " + where);
      }
      if (!std::isfinite(v) || errno == ERANGE) {
        throw DataError(source + ": non-finite value \"" + text + "\" at " + where);
      }
      values[c] = v;
    }
    rows.push_back(std::move(values));
  }
  if (rows.size() < 2) throw DataError(source + ": need at least two data rows");

  const auto n = static_cast<Index>(rows.size());
  const auto p = static_cast<Index>(header.size() - 1);
  Dataset data{Vector(n), Matrix(n, p)};
  for (Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    data.response[i] = r[0];
    for (Index j = 0; j < p; ++j) data.design(i, j) = r[static_cast<std::size_t>(j + 1)];
  }
  return data;
}

inline Dataset ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_dataset_csv(in, path);
}

inline void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << "y";
  for (Index j = 0; j < data.p(); ++j) out << ",x" << (j + 1);
  out << '\n';
  for (Index i = 0; i < data.n(); ++i) {
    out << format_double(data.response[i]);
    for (Index j = 0; j < data.p(); ++j) out << ',' << format_double(data.design(i, j));
    out << '\n';
  }
}

}  // namespace silfs

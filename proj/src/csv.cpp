#include "sdr/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "sdr/errors.hpp"

namespace sdr {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    if (c == delimiter && !quoted) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

bool parse_number(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

CsvTable parse_csv(std::istream& in, const CsvOptions& opts) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    header = split(line, opts.delimiter);
  }
  if (header.empty()) throw IngestError(1, 0, "CSV input has no header row");

  const auto find_column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError("column '" + name + "' not found in CSV header");
    return static_cast<std::size_t>(it - header.begin());
  };
  if (opts.response.empty()) throw ConfigError("no response column named");
  const std::size_t response = find_column(opts.response);
  std::vector<bool> dropped(header.size(), false);
  for (const auto& name : opts.exclude) dropped[find_column(name)] = true;
  dropped[response] = true;

  std::vector<std::string> features;
  std::vector<std::size_t> feature_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!dropped[j]) {
      features.push_back(header[j]);
      feature_cols.push_back(j);
    }
  }
  if (features.empty()) throw ConfigError("CSV has no feature columns left");

  std::vector<double> values;
  std::vector<double> responses;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split(line, opts.delimiter);
    if (cells.size() != header.size()) {
      throw IngestError(line_no, std::min(cells.size(), header.size()) + 1,
                        "line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, found " +
                            std::to_string(cells.size()));
    }
    const auto number = [&](std::size_t j) {
      double v = 0.0;
      if (!parse_number(cells[j], v)) {
        throw IngestError(line_no, j + 1,
                          "non-numeric cell '" + cells[j] + "' at line " + std::to_string(line_no) +
                              ", column " + std::to_string(j + 1) + " (" + header[j] + ")");
      }
      return v;
    };
    for (std::size_t j : feature_cols) values.push_back(number(j));
    responses.push_back(number(response));
  }

  const auto n = static_cast<Eigen::Index>(responses.size());
  const auto p = static_cast<Eigen::Index>(feature_cols.size());
  if (n < 2) throw IngestError(line_no, 0, "CSV needs at least two data rows");
  Eigen::MatrixXd X =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          values.data(), n, p);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(responses.data(), n);
  return CsvTable{Dataset(std::move(X), std::move(y)), std::move(features)};
}

CsvTable read_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return parse_csv(in, opts);
}

}  // namespace sdr

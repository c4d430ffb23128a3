#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sdr/data.hpp"

namespace sdr {

struct CsvOptions {
  char delimiter = ',';
  std::string response;               // header name of the response column
  std::vector<std::string> exclude;   // header names dropped from the features
};

struct CsvTable {
  Dataset data;
  std::vector<std::string> features;  // header names of the X columns, in order
};

/// Header row required. Cells may be wrapped in double quotes. Blank lines
/// are skipped. Throws ConfigError for a missing response/excluded column and
/// IngestError (1-based file line, 1-based column) for a non-numeric or
/// missing cell.
CsvTable parse_csv(std::istream& in, const CsvOptions& opts);
CsvTable read_csv(const std::string& path, const CsvOptions& opts);

}  // namespace sdr

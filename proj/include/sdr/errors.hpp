#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sdr {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition was not met by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

class RankError : public Error {
 public:
  RankError(std::size_t column, const std::string& what)
      : Error(what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class IterationLimitError : public Error {
 public:
  IterationLimitError(std::size_t iterations, const std::string& what)
      : Error(what), iterations_(iterations) {}
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

// A fitted direction vanished (zero cross-covariance or all-zero selection).
// `iteration` is 1-based.
class DegenerateDirectionError : public Error {
 public:
  DegenerateDirectionError(std::size_t iteration, const std::string& what)
      : Error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

// CSV ingestion failure. `row` is the 1-based line in the file, `column` the
// 1-based field index; 0 means "not applicable".
class IngestError : public Error {
 public:
  IngestError(std::size_t row, std::size_t column, const std::string& what)
      : Error(what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdr

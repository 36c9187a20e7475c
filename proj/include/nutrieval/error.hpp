#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nutrieval {

/// Base class for all harness errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad flags, unreadable config, missing config keys. Exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data that is missing or violates its schema. Exit code 2.
///
/// `file`, `row` and `column` locate the problem; `row` counts data rows from
/// 1 (the header is row 0) and is 0 when the error is not tied to a row.
class DataError : public Error {
 public:
  DataError(std::string file, std::size_t row, std::string column, const std::string& what);
  explicit DataError(const std::string& what) : Error(what) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::string file_;
  std::size_t row_ = 0;
  std::string column_;
};

/// A food string or descriptor that does not fit the `DESCRIPTOR (grams); ...` grammar.
class GrammarError : public DataError {
 public:
  GrammarError(std::size_t offset, const std::string& what);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Prediction backend could not be used at all (fail-fast). Exit code 3.
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace nutrieval

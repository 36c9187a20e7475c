#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nutrieval::csv {

/// An RFC 4180 table held in memory: a header row plus data rows.
///
/// Quoted fields may contain commas, doubled quotes and line breaks. Both LF
/// and CRLF record terminators are accepted; a trailing empty line is ignored.
class Table {
 public:
  /// Reads and parses `path`. Throws DataError naming the file when it is
  /// missing, empty, or a data row has the wrong number of fields.
  static Table read(const std::filesystem::path& path);
  static Table parse(std::string_view text, std::string source_name);

  const std::string& source() const { return source_; }
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  /// Fields of data row `i` (0-based here; errors report rows 1-based).
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

  /// Index of `name` in the header; throws DataError if the column is absent.
  std::size_t column(std::string_view name) const;
  /// Throws DataError unless the header is exactly `expected`.
  void require_header(const std::vector<std::string_view>& expected) const;

  /// Typed accessors; each throws DataError naming file, 1-based row and column.
  const std::string& text(std::size_t row, std::size_t col) const;
  double number(std::size_t row, std::size_t col) const;
  long long integer(std::size_t row, std::size_t col) const;

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Quotes a field if it contains a comma, quote, or line break.
std::string escape(std::string_view field);

}  // namespace nutrieval::csv

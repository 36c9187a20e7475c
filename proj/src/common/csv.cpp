#include "nutrieval/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nutrieval/error.hpp"

namespace nutrieval::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::vector<std::string>> split_records(std::string_view text, const std::string& source) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw DataError(source + ": line " + std::to_string(line) + ": stray quote inside unquoted field");
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        field.push_back(c);
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError(source + ": unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

}  // namespace

Table Table::parse(std::string_view text, std::string source_name) {
  Table t;
  t.source_ = std::move(source_name);
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  auto records = split_records(text, t.source_);
  if (records.empty()) throw DataError(t.source_, 0, "", "file is empty (expected a header row)");
  t.header_ = std::move(records.front());
  for (auto& h : t.header_) h = std::string(trim(h));
  for (std::size_t i = 1; i < records.size(); ++i) {
    auto& r = records[i];
    if (r.size() == 1 && r.front().empty()) continue;  // blank line
    if (r.size() != t.header_.size()) {
      throw DataError(t.source_, t.rows_.size() + 1, "",
                      "expected " + std::to_string(t.header_.size()) + " fields, found " +
                          std::to_string(r.size()));
    }
    t.rows_.push_back(std::move(r));
  }
  return t;
}

Table Table::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string(), 0, "", "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw DataError(source_, 0, std::string(name), "missing column");
}

void Table::require_header(const std::vector<std::string_view>& expected) const {
  for (auto name : expected) column(name);
  if (header_.size() != expected.size()) {
    throw DataError(source_, 0, "", "header has " + std::to_string(header_.size()) + " columns, expected " +
                                        std::to_string(expected.size()));
  }
}

const std::string& Table::text(std::size_t row, std::size_t col) const { return rows_.at(row).at(col); }

double Table::number(std::size_t row, std::size_t col) const {
  const auto field = trim(text(row, col));
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw DataError(source_, row + 1, header_[col], "not a finite number: \"" + std::string(field) + "\"");
  }
  return value;
}

long long Table::integer(std::size_t row, std::size_t col) const {
  const auto field = trim(text(row, col));
  long long value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataError(source_, row + 1, header_[col], "not an integer: \"" + std::string(field) + "\"");
  }
  return value;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace nutrieval::csv

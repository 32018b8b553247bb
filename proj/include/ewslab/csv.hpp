#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace ewslab {

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Minimal CSV row writer; fields are never quoted.
class CsvRow {
 public:
  explicit CsvRow(std::ostream& out) : out_(out) {}
  ~CsvRow() { out_ << '\n'; }
  CsvRow(const CsvRow&) = delete;
  CsvRow& operator=(const CsvRow&) = delete;

  CsvRow& operator<<(double v) { return field(format_double(v)); }
  CsvRow& operator<<(std::int64_t v) { return field(std::to_string(v)); }
  CsvRow& operator<<(int v) { return field(std::to_string(v)); }
  CsvRow& operator<<(std::string_view v) { return field(v); }
  CsvRow& operator<<(const char* v) { return field(v); }

 private:
  CsvRow& field(std::string_view v) {
    if (!first_) out_ << ',';
    first_ = false;
    out_ << v;
    return *this;
  }

  std::ostream& out_;
  bool first_ = true;
};

}  // namespace ewslab

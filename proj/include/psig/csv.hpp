#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "psig/common.hpp"

namespace psig::csv {

// RFC 4180 reader: comma separated, double-quote escaping, quoted fields
// may span lines. Tracks the physical line on which each row starts.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Returns false at end of input.
  bool next(std::vector<std::string>& row) {
    row.clear();
    int c = in_.get();
    if (c == EOF) return false;
    row_line_ = line_;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (;; c = in_.get()) {
      if (quoted) {
        if (c == EOF) throw DataError("unterminated quoted field starting on line " + std::to_string(row_line_));
        if (c == '"') {
          if (in_.peek() == '"') {
            field.push_back('"');
            in_.get();
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(static_cast<char>(c));
        }
        continue;
      }
      if (c == EOF || c == '\n') {
        if (c == '\n') ++line_;
        if (!field.empty() && field.back() == '\r') field.pop_back();
        row.push_back(std::move(field));
        return true;
      }
      if (c == ',') {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
        continue;
      }
      if (c == '"' && !field_started) {
        quoted = true;
        field_started = true;
        continue;
      }
      field_started = true;
      field.push_back(static_cast<char>(c));
    }
  }

  // 1-based line number on which the last returned row started.
  std::size_t line() const { return row_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t row_line_ = 0;
};

inline std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace psig::csv

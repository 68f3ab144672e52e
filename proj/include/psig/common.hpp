#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace psig {

using RecordId = std::uint32_t;

enum class Source : std::uint8_t { A, B, Single };

inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::A: return "A";
    case Source::B: return "B";
    case Source::Single: return "single";
  }
  return "?";
}

// Error taxonomy. The CLI maps these onto exit codes 2, 3 and 4.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline Source parse_source(std::string_view s) {
  if (s == "A" || s == "a") return Source::A;
  if (s == "B" || s == "b") return Source::B;
  if (s == "single") return Source::Single;
  throw ConfigError("unknown source tag '" + std::string(s) + "' (expected A, B or single)");
}

}  // namespace psig

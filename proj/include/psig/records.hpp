#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "psig/common.hpp"
#include "psig/csv.hpp"

namespace psig {

using Token = std::string;
using TokenSeq = std::vector<Token>;

struct AttributeSpec {
  std::string name;
  // Free-text attribute (titles, descriptions). Only used by config
  // validation heuristics.
  bool long_text = false;
};

class Schema {
 public:
  Schema() = default;
  Schema(std::initializer_list<std::string> names) {
    for (const auto& n : names) attributes_.push_back({n, false});
  }
  explicit Schema(std::vector<AttributeSpec> attrs) : attributes_(std::move(attrs)) {}

  std::size_t size() const { return attributes_.size(); }
  const AttributeSpec& operator[](std::size_t i) const { return attributes_[i]; }
  const std::vector<AttributeSpec>& attributes() const { return attributes_; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i)
      if (attributes_[i].name == name) return i;
    return std::nullopt;
  }

 private:
  std::vector<AttributeSpec> attributes_;
};

// One observation. `attributes` is aligned with the schema; a missing value
// is an empty token sequence.
struct Record {
  RecordId id = 0;
  Source source = Source::Single;
  std::string key;  // native key from the input file
  std::vector<TokenSeq> attributes;

  const TokenSeq& attribute(const Schema& schema, std::string_view name) const {
    auto idx = schema.index_of(name);
    if (!idx) throw ConfigError("unknown attribute '" + std::string(name) + "'");
    return attributes[*idx];
  }
};

inline bool is_word_byte(unsigned char c) {
  // Bytes >= 0x80 are parts of multi-byte UTF-8 (or Latin-1) letters.
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

// Lowercases and splits on every maximal run of non-alphanumeric characters.
inline TokenSeq tokenize(std::string_view raw) {
  TokenSeq out;
  std::string cur;
  for (char ch : raw) {
    auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      cur.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline std::string join(const TokenSeq& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

// How one input file maps onto the schema.
struct SourceSpec {
  Source tag = Source::Single;
  RecordId id_base = 0;
  std::string key_column;                         // empty: row number is the key
  std::map<std::string, std::string> columns;     // attribute -> column; default same name
};

inline std::vector<Record> load_csv(std::istream& in, const Schema& schema, const SourceSpec& spec,
                                    const std::string& label = "<stream>") {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw DataError(label + ": missing header row");
  if (!row.empty() && row[0].size() >= 3 && row[0].compare(0, 3, "\xEF\xBB\xBF") == 0) row[0].erase(0, 3);
  const std::size_t arity = row.size();

  auto column_index = [&](const std::string& column) -> std::size_t {
    auto it = std::find(row.begin(), row.end(), column);
    if (it == row.end()) throw DataError(label + ": header is missing column '" + column + "'");
    return static_cast<std::size_t>(it - row.begin());
  };
  std::vector<std::size_t> attr_cols;
  for (const auto& attr : schema.attributes()) {
    auto m = spec.columns.find(attr.name);
    attr_cols.push_back(column_index(m == spec.columns.end() ? attr.name : m->second));
  }
  std::optional<std::size_t> key_col;
  if (!spec.key_column.empty()) key_col = column_index(spec.key_column);

  std::vector<Record> records;
  RecordId next_id = spec.id_base;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (row.size() != arity)
      throw DataError(label + ": line " + std::to_string(reader.line()) + ": expected " + std::to_string(arity) +
                      " fields, found " + std::to_string(row.size()));
    Record r;
    r.id = next_id++;
    r.source = spec.tag;
    r.key = key_col ? row[*key_col] : std::to_string(r.id - spec.id_base);
    r.attributes.reserve(attr_cols.size());
    for (auto col : attr_cols) r.attributes.push_back(tokenize(row[col]));
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<Record> load_csv(const std::filesystem::path& path, const Schema& schema,
                                    const SourceSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return load_csv(in, schema, spec, path.string());
}

inline std::vector<Record> load_csv(const std::filesystem::path& path, const Schema& schema, Source source) {
  SourceSpec spec;
  spec.tag = source;
  return load_csv(path, schema, spec);
}

struct DedupResult {
  std::vector<Record> canonical;                    // sorted by id
  std::unordered_map<RecordId, RecordId> alias_map;  // original id -> canonical id
};

// Equality key over the full token sequence with attribute boundaries.
inline std::string normalized_content(const Record& r) {
  std::string out;
  for (const auto& attr : r.attributes) {
    for (const auto& tok : attr) {
      out.append(tok);
      out.push_back('\x1f');
    }
    out.push_back('\x1d');
  }
  return out;
}

// Exact-duplicate removal. Source-blind: callers that must keep sources
// apart deduplicate each source separately.
inline DedupResult deduplicate(std::vector<Record> records) {
  std::sort(records.begin(), records.end(), [](const Record& x, const Record& y) { return x.id < y.id; });
  DedupResult result;
  std::unordered_map<std::string, RecordId> first_seen;
  first_seen.reserve(records.size());
  result.alias_map.reserve(records.size());
  for (auto& r : records) {
    auto [it, inserted] = first_seen.try_emplace(normalized_content(r), r.id);
    result.alias_map.emplace(r.id, it->second);
    if (inserted) result.canonical.push_back(std::move(r));
  }
  return result;
}

}  // namespace psig

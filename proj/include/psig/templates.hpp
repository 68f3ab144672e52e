#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psig/common.hpp"
#include "psig/records.hpp"

namespace psig {

// Candidate-signature extractors. Each one turns an attribute's token
// sequence into zero or more token sequences ("part values").
struct Extractor {
  enum class Kind { ConsecutiveWords, RandomWords, FullAttribute, LastDigits };

  Kind kind = Kind::ConsecutiveWords;
  std::string attr;
  std::size_t param = 1;  // n, k or d; unused for FullAttribute

  static Extractor consecutive(std::string attr, std::size_t n) { return {Kind::ConsecutiveWords, std::move(attr), n}; }
  static Extractor random_words(std::string attr, std::size_t k) { return {Kind::RandomWords, std::move(attr), k}; }
  static Extractor full(std::string attr) { return {Kind::FullAttribute, std::move(attr), 1}; }
  static Extractor last_digits(std::string attr, std::size_t d) { return {Kind::LastDigits, std::move(attr), d}; }
};

inline std::string_view to_string(Extractor::Kind k) {
  switch (k) {
    case Extractor::Kind::ConsecutiveWords: return "consecutive";
    case Extractor::Kind::RandomWords: return "random";
    case Extractor::Kind::FullAttribute: return "full";
    case Extractor::Kind::LastDigits: return "last_digits";
  }
  return "?";
}

inline Extractor::Kind parse_extractor_kind(std::string_view s) {
  if (s == "consecutive") return Extractor::Kind::ConsecutiveWords;
  if (s == "random") return Extractor::Kind::RandomWords;
  if (s == "full") return Extractor::Kind::FullAttribute;
  if (s == "last_digits") return Extractor::Kind::LastDigits;
  throw ConfigError("unknown extractor kind '" + std::string(s) + "'");
}

// A composite recipe. Templates sharing a `family` are compared against
// each other during elimination; the family defaults to the template id.
struct SignatureTemplate {
  int id = 0;
  std::vector<Extractor> parts;
  std::optional<int> family;

  int family_id() const { return family.value_or(id); }
};

struct KeyFormat {
  char part_sep = '|';
  char token_sep = '.';
};

struct ExtractLimits {
  std::size_t combination_cap = 64;
  std::size_t random_words_max_tokens = 12;
  std::size_t max_signature_tokens = 6;  // guideline warning threshold
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

namespace detail {

inline std::size_t min_token_yield(const Extractor& e) {
  switch (e.kind) {
    case Extractor::Kind::ConsecutiveWords:
    case Extractor::Kind::RandomWords: return e.param;
    case Extractor::Kind::FullAttribute:
    case Extractor::Kind::LastDigits: return 1;
  }
  return 1;
}

}  // namespace detail

inline ValidationReport validate_config(const std::vector<SignatureTemplate>& templates, const Schema& schema,
                                        const ExtractLimits& limits = {}, const KeyFormat& fmt = {}) {
  ValidationReport report;
  if (templates.empty()) report.errors.push_back("no candidate-signature templates configured");
  if (fmt.part_sep == fmt.token_sep || is_word_byte(static_cast<unsigned char>(fmt.part_sep)) ||
      is_word_byte(static_cast<unsigned char>(fmt.token_sep)))
    report.errors.push_back("key separators must be distinct non-alphanumeric ASCII characters");
  if (limits.combination_cap == 0) report.errors.push_back("combination cap must be positive");

  std::map<int, const SignatureTemplate*> by_id;
  std::map<int, const SignatureTemplate*> family_head;
  for (const auto& t : templates) {
    const std::string name = "template " + std::to_string(t.id);
    if (t.id < 0) report.errors.push_back(name + ": id must be non-negative");
    if (!by_id.emplace(t.id, &t).second) report.errors.push_back(name + ": duplicate template id");
    if (t.parts.empty()) {
      report.errors.push_back(name + ": has no parts");
      continue;
    }
    std::size_t yield = 0;
    for (const auto& p : t.parts) {
      auto idx = schema.index_of(p.attr);
      if (!idx) report.errors.push_back(name + ": unknown attribute '" + p.attr + "'");
      if (p.kind != Extractor::Kind::FullAttribute && p.param < 1)
        report.errors.push_back(name + ": " + std::string(to_string(p.kind)) + " on '" + p.attr +
                                "' needs a parameter >= 1");
      yield += detail::min_token_yield(p);
    }
    if (yield > limits.max_signature_tokens)
      report.warnings.push_back(name + ": yields at least " + std::to_string(yield) +
                                " tokens per key; short candidate signatures recur more often");
    if (t.parts.size() == 1) {
      const auto& p = t.parts.front();
      auto idx = schema.index_of(p.attr);
      if (idx && schema[*idx].long_text && detail::min_token_yield(p) == 1 &&
          (p.kind == Extractor::Kind::ConsecutiveWords || p.kind == Extractor::Kind::RandomWords))
        report.warnings.push_back(name + ": single words of long-text attribute '" + p.attr +
                                  "' are rarely distinctive");
    }

    auto [head, fresh] = family_head.emplace(t.family_id(), &t);
    if (!fresh) {
      const auto& h = *head->second;
      bool compatible = h.parts.size() == t.parts.size();
      for (std::size_t i = 0; compatible && i < t.parts.size(); ++i)
        compatible = h.parts[i].kind == t.parts[i].kind && h.parts[i].attr == t.parts[i].attr;
      if (!compatible)
        report.errors.push_back(name + ": family " + std::to_string(t.family_id()) +
                                " members must have the same part kinds over the same attributes");
    }
  }
  return report;
}

struct DecodedKey {
  int template_id = 0;
  std::vector<TokenSeq> parts;
};

// A validated template list bound to a schema, ready for extraction.
class TemplateSet {
 public:
  struct Extraction {
    std::vector<std::string> keys;  // sorted, unique
    bool skipped = false;            // combination cap exceeded
  };

  TemplateSet(Schema schema, std::vector<SignatureTemplate> templates, ExtractLimits limits = {},
              KeyFormat fmt = {})
      : schema_(std::move(schema)), templates_(std::move(templates)), limits_(limits), fmt_(fmt) {
    auto report = validate_config(templates_, schema_, limits_, fmt_);
    if (!report.ok()) {
      std::string msg = "invalid template configuration:";
      for (const auto& e : report.errors) msg += "\n  " + e;
      throw ConfigError(msg);
    }
    warnings_ = std::move(report.warnings);
    for (const auto& t : templates_) {
      std::vector<std::size_t> idx;
      for (const auto& p : t.parts) idx.push_back(*schema_.index_of(p.attr));
      attr_index_.push_back(std::move(idx));
      family_.emplace(t.id, t.family_id());
    }
  }

  const Schema& schema() const { return schema_; }
  const std::vector<SignatureTemplate>& templates() const { return templates_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const ExtractLimits& limits() const { return limits_; }
  const KeyFormat& key_format() const { return fmt_; }

  int family_of(int template_id) const {
    auto it = family_.find(template_id);
    return it == family_.end() ? template_id : it->second;
  }

  Extraction extract(std::size_t template_index, const Record& record) const {
    const auto& t = templates_[template_index];
    const auto& cols = attr_index_[template_index];
    std::vector<std::vector<std::string>> part_values;
    part_values.reserve(t.parts.size());
    std::size_t combos = 1;
    Extraction out;
    for (std::size_t i = 0; i < t.parts.size(); ++i) {
      part_values.push_back(part_yield(t.parts[i], record.attributes[cols[i]]));
      const std::size_t n = part_values.back().size();
      if (n == 0) return out;
      combos = (combos > std::numeric_limits<std::size_t>::max() / n) ? std::numeric_limits<std::size_t>::max()
                                                                       : combos * n;
    }
    if (combos > limits_.combination_cap) {
      out.skipped = true;
      return out;
    }
    out.keys.reserve(combos);
    std::string prefix = std::to_string(t.id);
    cartesian(part_values, 0, prefix, out.keys);
    std::sort(out.keys.begin(), out.keys.end());
    out.keys.erase(std::unique(out.keys.begin(), out.keys.end()), out.keys.end());
    return out;
  }

  Extraction extract(const SignatureTemplate& t, const Record& record) const {
    for (std::size_t i = 0; i < templates_.size(); ++i)
      if (templates_[i].id == t.id) return extract(i, record);
    throw ConfigError("template " + std::to_string(t.id) + " is not part of this template set");
  }

  DecodedKey decode(std::string_view key) const {
    DecodedKey out;
    std::size_t pos = key.find(fmt_.part_sep);
    if (pos == std::string_view::npos) throw InvariantError("malformed candidate-signature key");
    out.template_id = std::stoi(std::string(key.substr(0, pos)));
    while (pos != std::string_view::npos) {
      std::size_t next = key.find(fmt_.part_sep, pos + 1);
      auto part = key.substr(pos + 1, next == std::string_view::npos ? std::string_view::npos : next - pos - 1);
      TokenSeq toks;
      std::size_t s = 0;
      while (true) {
        std::size_t e = part.find(fmt_.token_sep, s);
        toks.emplace_back(part.substr(s, e == std::string_view::npos ? std::string_view::npos : e - s));
        if (e == std::string_view::npos) break;
        s = e + 1;
      }
      out.parts.push_back(std::move(toks));
      pos = next;
    }
    return out;
  }

 private:
  std::vector<std::string> part_yield(const Extractor& e, const TokenSeq& tokens) const {
    std::vector<std::string> out;
    const char sep = fmt_.token_sep;
    switch (e.kind) {
      case Extractor::Kind::ConsecutiveWords: {
        if (tokens.size() < e.param) break;
        for (std::size_t i = 0; i + e.param <= tokens.size(); ++i) {
          std::string v = tokens[i];
          for (std::size_t j = 1; j < e.param; ++j) (v += sep) += tokens[i + j];
          out.push_back(std::move(v));
        }
        break;
      }
      case Extractor::Kind::RandomWords: {
        if (tokens.size() < e.param || tokens.size() > limits_.random_words_max_tokens) break;
        TokenSeq sorted = tokens;
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::size_t> pick(e.param);
        for (std::size_t i = 0; i < e.param; ++i) pick[i] = i;
        const std::size_t n = sorted.size();
        while (true) {
          std::string v = sorted[pick[0]];
          for (std::size_t j = 1; j < e.param; ++j) (v += sep) += sorted[pick[j]];
          out.push_back(std::move(v));
          std::size_t i = e.param;
          while (i > 0 && pick[i - 1] == n - e.param + i - 1) --i;
          if (i == 0) break;
          ++pick[i - 1];
          for (std::size_t j = i; j < e.param; ++j) pick[j] = pick[j - 1] + 1;
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        break;
      }
      case Extractor::Kind::FullAttribute:
        if (!tokens.empty()) out.push_back(join(tokens, std::string_view(&sep, 1)));
        break;
      case Extractor::Kind::LastDigits: {
        std::string digits;
        for (const auto& t : tokens)
          if (std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) digits += t;
        if (digits.size() >= e.param) out.push_back(digits.substr(digits.size() - e.param));
        break;
      }
    }
    return out;
  }

  void cartesian(const std::vector<std::vector<std::string>>& parts, std::size_t i, const std::string& prefix,
                 std::vector<std::string>& out) const {
    if (i == parts.size()) {
      out.push_back(prefix);
      return;
    }
    for (const auto& v : parts[i]) {
      std::string next = prefix;
      next += fmt_.part_sep;
      next += v;
      cartesian(parts, i + 1, next, out);
    }
  }

  Schema schema_;
  std::vector<SignatureTemplate> templates_;
  ExtractLimits limits_;
  KeyFormat fmt_;
  std::vector<std::string> warnings_;
  std::vector<std::vector<std::size_t>> attr_index_;
  std::map<int, int> family_;
};

}  // namespace psig

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psig/common.hpp"
#include "psig/linker.hpp"
#include "psig/records.hpp"
#include "psig/sigprob.hpp"
#include "psig/templates.hpp"

namespace psig {

struct SourceConfig {
  std::filesystem::path path;
  SourceSpec spec;
};

struct TruthConfig {
  std::filesystem::path path;
  std::string column_a = "id_a";
  std::string column_b = "id_b";
};

struct LinkConfig {
  double rho = 0.5;
  double tau = 0.5;
  std::string verifier = "none";
  bool cross_source_only = false;
  bool skip_elimination = false;
};

struct GridSpec {
  std::vector<double> a, b, rho, tau;

  std::size_t cells() const { return a.size() * b.size() * rho.size() * tau.size(); }
};

// Everything a run needs. Relative paths are resolved against the
// directory holding the config file.
struct PipelineConfig {
  Schema schema;
  std::vector<SourceConfig> sources;
  std::vector<SignatureTemplate> templates;
  ExtractLimits limits;
  KeyFormat key_format;
  ProbabilityModel model;
  LinkConfig link;
  std::size_t hard_k_cap = kDefaultHardRecurrenceCap;
  std::optional<TruthConfig> truth;
  std::optional<GridSpec> grid;
  std::filesystem::path output_dir;
  nlohmann::json raw;  // as parsed, for emitting tuned configs

  bool two_source() const { return sources.size() == 2; }
};

namespace detail {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

inline char separator(const nlohmann::json& j, const char* key, char fallback) {
  auto s = get_or<std::string>(j, key, std::string(1, fallback));
  if (s.size() != 1) throw ConfigError(std::string("key.") + key + " must be a single character");
  return s[0];
}

inline std::vector<double> number_list(const nlohmann::json& grid, const char* key) {
  if (!grid.contains(key)) throw ConfigError(std::string("grid.") + key + " is missing");
  const auto& v = grid.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(std::string("grid.") + key + " must be a non-empty list");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("grid.") + key + " must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace detail

inline constexpr RecordId kDefaultSourceBBase = 1'000'000'000;

// Validates everything that can be checked without reading data.
// Returns guideline warnings; throws ConfigError on errors.
inline std::vector<std::string> validate(const PipelineConfig& cfg) {
  std::vector<std::string> errors;
  if (cfg.schema.size() == 0) errors.push_back("schema is empty");
  if (cfg.sources.empty() || cfg.sources.size() > 2) errors.push_back("exactly one or two sources are required");
  if (cfg.sources.size() == 2 &&
      !(cfg.sources[0].spec.tag == Source::A && cfg.sources[1].spec.tag == Source::B))
    errors.push_back("two-source runs need sources tagged A then B");
  if (cfg.link.cross_source_only && cfg.sources.size() != 2)
    errors.push_back("link.cross_source_only needs two sources");
  try {
    cfg.model.validate();
    (void)max_recurrence(cfg.model, cfg.link.rho, cfg.hard_k_cap);
  } catch (const ConfigError& e) {
    errors.push_back(e.what());
  }
  if (!(cfg.link.tau > 0.0 && cfg.link.tau < 1.0)) errors.push_back("link.tau must lie in (0, 1)");
  try {
    (void)VerifierRegistry::instance().make(cfg.link.verifier);
  } catch (const ConfigError& e) {
    errors.push_back(e.what());
  }
  auto report = validate_config(cfg.templates, cfg.schema, cfg.limits, cfg.key_format);
  errors.insert(errors.end(), report.errors.begin(), report.errors.end());
  if (cfg.grid) {
    for (double a : cfg.grid->a)
      if (!(a > 1.0)) errors.push_back("grid.a values must be > 1");
    for (double b : cfg.grid->b)
      if (!(b > 0.0)) errors.push_back("grid.b values must be > 0");
    for (double r : cfg.grid->rho)
      if (!(r > 0.0 && r < 1.0)) errors.push_back("grid.rho values must lie in (0, 1)");
    for (double t : cfg.grid->tau)
      if (!(t > 0.0 && t < 1.0)) errors.push_back("grid.tau values must lie in (0, 1)");
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  auto warnings = report.warnings;
  if (cfg.model.unusual()) warnings.push_back("model.b >= 1: no candidate can exceed probability 0.5");
  return warnings;
}

namespace detail {

inline PipelineConfig parse_config_unchecked(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  PipelineConfig cfg;
  cfg.raw = j;

  if (!j.contains("schema") || !j.at("schema").is_array()) throw ConfigError("config needs a 'schema' list");
  std::vector<AttributeSpec> attrs;
  for (const auto& a : j.at("schema")) {
    if (a.is_string()) {
      attrs.push_back({a.get<std::string>(), false});
    } else if (a.is_object() && a.contains("name")) {
      attrs.push_back({a.at("name").get<std::string>(), get_or<bool>(a, "long_text", false)});
    } else {
      throw ConfigError("schema entries must be names or {name, long_text}");
    }
  }
  cfg.schema = Schema(std::move(attrs));

  if (!j.contains("sources") || !j.at("sources").is_array()) throw ConfigError("config needs a 'sources' list");
  const auto& sources = j.at("sources");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto& s = sources[i];
    SourceConfig sc;
    if (!s.contains("path")) throw ConfigError("every source needs a 'path'");
    sc.path = detail::resolve_path(base_dir, s.at("path").get<std::string>());
    sc.spec.tag = parse_source(get_or<std::string>(s, "tag", sources.size() == 2 ? (i == 0 ? "A" : "B") : "single"));
    sc.spec.id_base = get_or<RecordId>(s, "id_base", sc.spec.tag == Source::B ? kDefaultSourceBBase : 0);
    sc.spec.key_column = get_or<std::string>(s, "key_column", "");
    if (s.contains("columns")) {
      for (const auto& [attr, col] : s.at("columns").items()) sc.spec.columns[attr] = col.get<std::string>();
    }
    cfg.sources.push_back(std::move(sc));
  }

  if (!j.contains("templates") || !j.at("templates").is_array())
    throw ConfigError("config needs a 'templates' list");
  for (const auto& t : j.at("templates")) {
    SignatureTemplate st;
    st.id = get_or<int>(t, "id", -1);
    if (t.contains("family")) st.family = t.at("family").get<int>();
    if (t.contains("parts")) {
      for (const auto& p : t.at("parts")) {
        Extractor e;
        e.kind = parse_extractor_kind(get_or<std::string>(p, "kind", ""));
        e.attr = get_or<std::string>(p, "attr", "");
        switch (e.kind) {
          case Extractor::Kind::ConsecutiveWords: e.param = get_or<std::size_t>(p, "n", 0); break;
          case Extractor::Kind::RandomWords: e.param = get_or<std::size_t>(p, "k", 0); break;
          case Extractor::Kind::LastDigits: e.param = get_or<std::size_t>(p, "d", 0); break;
          case Extractor::Kind::FullAttribute: e.param = 1; break;
        }
        st.parts.push_back(std::move(e));
      }
    }
    cfg.templates.push_back(std::move(st));
  }

  if (j.contains("limits")) {
    const auto& l = j.at("limits");
    cfg.limits.combination_cap = get_or<std::size_t>(l, "combination_cap", cfg.limits.combination_cap);
    cfg.limits.random_words_max_tokens =
        get_or<std::size_t>(l, "random_words_max_tokens", cfg.limits.random_words_max_tokens);
    cfg.limits.max_signature_tokens = get_or<std::size_t>(l, "max_signature_tokens", cfg.limits.max_signature_tokens);
    cfg.hard_k_cap = get_or<std::size_t>(l, "hard_k_cap", cfg.hard_k_cap);
  }
  if (j.contains("key")) {
    cfg.key_format.part_sep = detail::separator(j.at("key"), "part_sep", cfg.key_format.part_sep);
    cfg.key_format.token_sep = detail::separator(j.at("key"), "token_sep", cfg.key_format.token_sep);
  }
  if (j.contains("model")) {
    cfg.model.a = get_or<double>(j.at("model"), "a", cfg.model.a);
    cfg.model.b = get_or<double>(j.at("model"), "b", cfg.model.b);
  }
  cfg.link.cross_source_only = cfg.sources.size() == 2;
  if (j.contains("link")) {
    const auto& l = j.at("link");
    cfg.link.rho = get_or<double>(l, "rho", cfg.link.rho);
    cfg.link.tau = get_or<double>(l, "tau", cfg.link.tau);
    cfg.link.verifier = get_or<std::string>(l, "verifier", cfg.link.verifier);
    cfg.link.cross_source_only = get_or<bool>(l, "cross_source_only", cfg.link.cross_source_only);
    cfg.link.skip_elimination = get_or<bool>(l, "skip_elimination", cfg.link.skip_elimination);
  }
  if (j.contains("truth")) {
    const auto& t = j.at("truth");
    TruthConfig tc;
    if (!t.contains("path")) throw ConfigError("truth needs a 'path'");
    tc.path = detail::resolve_path(base_dir, t.at("path").get<std::string>());
    if (t.contains("columns")) {
      const auto& c = t.at("columns");
      if (!c.is_array() || c.size() != 2) throw ConfigError("truth.columns must list two column names");
      tc.column_a = c[0].get<std::string>();
      tc.column_b = c[1].get<std::string>();
    }
    cfg.truth = tc;
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    cfg.grid = GridSpec{detail::number_list(g, "a"), detail::number_list(g, "b"), detail::number_list(g, "rho"),
                        detail::number_list(g, "tau")};
  }
  if (j.contains("output")) cfg.output_dir = detail::resolve_path(base_dir, j.at("output").get<std::string>());
  return cfg;
}

}  // namespace detail

inline PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  try {
    return detail::parse_config_unchecked(j, base_dir);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  auto base = path.parent_path();
  return parse_config(j, base.empty() ? std::filesystem::path(".") : base);
}

}  // namespace psig

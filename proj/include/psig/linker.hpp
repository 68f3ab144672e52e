#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psig/common.hpp"
#include "psig/indexer.hpp"
#include "psig/parallel.hpp"
#include "psig/records.hpp"
#include "psig/templates.hpp"

namespace psig {

// Id-ordered view over the deduplicated records.
class RecordTable {
 public:
  RecordTable() = default;
  explicit RecordTable(std::vector<Record> records) : records_(std::move(records)) {
    std::sort(records_.begin(), records_.end(), [](const Record& x, const Record& y) { return x.id < y.id; });
  }

  const Record& at(RecordId id) const {
    auto it = std::lower_bound(records_.begin(), records_.end(), id,
                               [](const Record& r, RecordId v) { return r.id < v; });
    if (it == records_.end() || it->id != id) throw InvariantError("unknown record id " + std::to_string(id));
    return *it;
  }
  Source source_of(RecordId id) const { return at(id).source; }

  std::span<const Record> records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<Record> records_;
};

// (r_i, r_j, s, p_s) evidence row; `entry` indexes the InvertedIndex.
struct LinkTuple {
  RecordId r_i = 0;
  RecordId r_j = 0;
  std::uint32_t entry = 0;
  double p = 0.0;

  friend bool operator<(const LinkTuple& x, const LinkTuple& y) {
    if (x.r_i != y.r_i) return x.r_i < y.r_i;
    if (x.r_j != y.r_j) return x.r_j < y.r_j;
    return x.entry < y.entry;
  }
};

struct ScoredPair {
  RecordId r_i = 0;
  RecordId r_j = 0;
  double probability = 0.0;
  std::uint32_t evidence_count = 0;
};

struct Link {
  RecordId r_i = 0;
  RecordId r_j = 0;
  double probability = 0.0;
  std::uint32_t evidence_count = 0;

  friend bool operator==(const Link&, const Link&) = default;
};

// Optional domain predicate applied to pairs that pass tau.
struct PostVerifier {
  std::string name;
  std::function<bool(const Record&, const Record&)> accept;
};

inline std::vector<Token> token_set(const Record& r) {
  std::vector<Token> all;
  for (const auto& attr : r.attributes) all.insert(all.end(), attr.begin(), attr.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

inline double jaccard(const Record& x, const Record& y) {
  const auto a = token_set(x);
  const auto b = token_set(y);
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] == b[j]) {
      ++common;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

inline PostVerifier jaccard_verifier(double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("jaccard threshold must lie in [0, 1]");
  return {"jaccard:" + format_probability(threshold),
          [threshold](const Record& x, const Record& y) { return jaccard(x, y) >= threshold; }};
}

// Named verifier factories; the argument is whatever follows "name:".
class VerifierRegistry {
 public:
  using Factory = std::function<PostVerifier(const std::string& arg)>;

  static VerifierRegistry& instance() {
    static VerifierRegistry registry;
    return registry;
  }

  void add(const std::string& name, Factory f) {
    std::lock_guard lock(mu_);
    factories_[name] = std::move(f);
  }

  // "none" -> empty; "jaccard:0.3" -> built-in; otherwise a registered name.
  std::optional<PostVerifier> make(const std::string& spec) const {
    if (spec.empty() || spec == "none") return std::nullopt;
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    std::lock_guard lock(mu_);
    auto it = factories_.find(name);
    if (it == factories_.end()) throw ConfigError("unknown post-verifier '" + name + "'");
    return it->second(arg);
  }

 private:
  VerifierRegistry() {
    factories_["jaccard"] = [](const std::string& arg) {
      try {
        std::size_t used = 0;
        double t = std::stod(arg, &used);
        if (used != arg.size()) throw std::invalid_argument(arg);
        return jaccard_verifier(t);
      } catch (const std::logic_error&) {
        throw ConfigError("link.verifier: jaccard needs a numeric threshold, got '" + arg + "'");
      }
    };
  }

  mutable std::mutex mu_;
  std::map<std::string, Factory> factories_;
};

// Generation: every unordered posting pair of every entry, sorted by
// (r_i, r_j, entry).
inline std::vector<LinkTuple> generate(const InvertedIndex& index, const RecordTable& records,
                                       bool cross_source_only, std::size_t threads = 1) {
  const auto& entries = index.entries();
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, entries.size()));
  std::vector<std::vector<LinkTuple>> partial(workers);
  parallel_chunks(entries.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t w) {
    auto& out = partial[w];
    std::vector<Source> src;
    for (std::size_t e = begin; e < end; ++e) {
      const auto& post = entries[e].postings;
      if (post.size() < 2) continue;
      if (cross_source_only) {
        src.clear();
        for (auto id : post) src.push_back(records.source_of(id));
      }
      for (std::size_t i = 0; i + 1 < post.size(); ++i)
        for (std::size_t j = i + 1; j < post.size(); ++j) {
          if (cross_source_only && src[i] == src[j]) continue;
          out.push_back({post[i], post[j], static_cast<std::uint32_t>(e), entries[e].p});
        }
    }
  });
  std::vector<LinkTuple> tuples;
  std::size_t total = 0;
  for (const auto& p : partial) total += p.size();
  tuples.reserve(total);
  for (auto& p : partial) {
    tuples.insert(tuples.end(), p.begin(), p.end());
    p.clear();
    p.shrink_to_fit();
  }
  std::sort(tuples.begin(), tuples.end());
  return tuples;
}

namespace detail {

inline bool parts_subrecord(const DecodedKey& s, const DecodedKey& t) {
  if (s.parts.size() != t.parts.size()) return false;
  for (std::size_t i = 0; i < s.parts.size(); ++i)
    if (!subrecord_of(s.parts[i], t.parts[i])) return false;
  return true;
}

}  // namespace detail

// Elimination over the tuples of one pair: drop a tuple when its key is a
// strict part-wise subrecord of another tuple's key in the same family.
inline std::vector<LinkTuple> eliminate(std::span<const LinkTuple> tuples, const InvertedIndex& index,
                                        const TemplateSet& templates) {
  std::vector<LinkTuple> kept(tuples.begin(), tuples.end());
  if (tuples.size() < 2) return kept;
  const auto& entries = index.entries();

  bool shared_family = false;
  for (std::size_t i = 0; i < tuples.size() && !shared_family; ++i)
    for (std::size_t j = i + 1; j < tuples.size() && !shared_family; ++j)
      shared_family = templates.family_of(entries[tuples[i].entry].template_id) ==
                      templates.family_of(entries[tuples[j].entry].template_id);
  if (!shared_family) return kept;

  std::vector<DecodedKey> decoded;
  std::vector<int> family;
  for (const auto& t : tuples) {
    decoded.push_back(templates.decode(entries[t.entry].key));
    family.push_back(templates.family_of(decoded.back().template_id));
  }
  kept.clear();
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < tuples.size() && !dominated; ++j) {
      if (i == j || family[i] != family[j]) continue;
      dominated = decoded[i].parts != decoded[j].parts && detail::parts_subrecord(decoded[i], decoded[j]);
    }
    if (!dominated) kept.push_back(tuples[i]);
  }
  return kept;
}

// Product: 1 - prod(1 - p_s), accumulated in tuple order.
inline double combine(std::span<const LinkTuple> tuples) {
  double miss = 1.0;
  for (const auto& t : tuples) miss *= (1.0 - t.p);
  return 1.0 - miss;
}

struct LinkOptions {
  bool cross_source_only = false;
  bool skip_elimination = false;
  std::size_t threads = 1;
};

// Generation, Elimination and Product for every candidate pair. Each
// pair's evidence is combined in key order, so the result does not depend
// on how the index happens to be laid out.
inline std::vector<ScoredPair> score_pairs(const InvertedIndex& index, const RecordTable& records,
                                           const TemplateSet& templates, const LinkOptions& opt = {}) {
  const auto tuples = generate(index, records, opt.cross_source_only, opt.threads);
  const auto& entries = index.entries();
  std::vector<ScoredPair> scored;
  std::vector<LinkTuple> group;
  for (std::size_t i = 0; i < tuples.size();) {
    std::size_t j = i;
    while (j < tuples.size() && tuples[j].r_i == tuples[i].r_i && tuples[j].r_j == tuples[i].r_j) ++j;
    group.assign(tuples.begin() + static_cast<std::ptrdiff_t>(i), tuples.begin() + static_cast<std::ptrdiff_t>(j));
    if (group.size() > 1) {
      std::sort(group.begin(), group.end(),
                [&](const LinkTuple& x, const LinkTuple& y) { return entries[x.entry].key < entries[y.entry].key; });
      if (!opt.skip_elimination) group = eliminate(group, index, templates);
    }
    scored.push_back({tuples[i].r_i, tuples[i].r_j, combine(group), static_cast<std::uint32_t>(group.size())});
    i = j;
  }
  return scored;
}

struct FinalizeCounts {
  std::size_t pairwise_links = 0;  // probability > tau
  std::size_t verified_links = 0;  // also accepted by the verifier
};

// Keeps pairs whose combined probability strictly exceeds tau and, when a
// verifier is configured, that it accepts.
inline std::vector<Link> finalize(std::span<const ScoredPair> pairs, double tau, const PostVerifier* verifier,
                                  const RecordTable* records, FinalizeCounts* counts = nullptr) {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("link.tau must lie in (0, 1)");
  if (verifier && !records) throw InvariantError("finalize: verifier needs the record table");
  std::vector<Link> links;
  FinalizeCounts c;
  for (const auto& p : pairs) {
    if (!(p.probability > tau)) continue;
    ++c.pairwise_links;
    if (verifier && !verifier->accept(records->at(p.r_i), records->at(p.r_j))) continue;
    links.push_back({p.r_i, p.r_j, p.probability, p.evidence_count});
  }
  c.verified_links = links.size();
  if (counts) *counts = c;
  return links;
}

}  // namespace psig

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string_view>
#include <cstdio>
#include <iterator>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psig/common.hpp"
#include "psig/parallel.hpp"
#include "psig/records.hpp"
#include "psig/sigprob.hpp"
#include "psig/templates.hpp"

namespace psig {

struct IndexEntry {
  std::string key;
  int template_id = 0;
  std::vector<RecordId> postings;  // ascending, unique
  double p = 0.0;
};

struct IndexStats {
  std::size_t candidate_signatures = 0;  // (record, key) pairs extracted
  std::size_t total_keys_seen = 0;       // distinct keys before pruning
  std::size_t keys_pruned_by_rho = 0;
  std::size_t max_posting_len = 0;       // over surviving entries
  std::size_t skipped_record_templates = 0;
  std::size_t recurrence_cap = 0;        // k_max in force
  bool hit_hard_cap = false;
};

// Index order is (hash of key, key): grouping sorts small fixed-size rows
// instead of strings. Only dump_index presents entries by key.
inline std::uint64_t key_hash(std::string_view key) { return std::hash<std::string_view>{}(key); }

inline bool index_order(const IndexEntry& x, const IndexEntry& y) {
  const auto hx = key_hash(x.key), hy = key_hash(y.key);
  return hx != hy ? hx < hy : x.key < y.key;
}

class InvertedIndex {
 public:
  InvertedIndex() = default;
  InvertedIndex(std::vector<IndexEntry> entries, IndexStats stats) : entries_(std::move(entries)), stats_(stats) {
    hashes_.reserve(entries_.size());
    for (const auto& e : entries_) hashes_.push_back(key_hash(e.key));
    if (!std::is_sorted(entries_.begin(), entries_.end(), index_order)) {
      std::sort(entries_.begin(), entries_.end(), index_order);
      for (std::size_t i = 0; i < entries_.size(); ++i) hashes_[i] = key_hash(entries_[i].key);
    }
  }

  const std::vector<IndexEntry>& entries() const { return entries_; }
  const IndexStats& stats() const { return stats_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const IndexEntry* find(std::string_view key) const {
    const auto h = key_hash(key);
    auto it = std::lower_bound(hashes_.begin(), hashes_.end(), h);
    for (; it != hashes_.end() && *it == h; ++it) {
      const auto& e = entries_[static_cast<std::size_t>(it - hashes_.begin())];
      if (e.key == key) return &e;
    }
    return nullptr;
  }

 private:
  std::vector<IndexEntry> entries_;  // index order
  std::vector<std::uint64_t> hashes_;
  IndexStats stats_;
};

// Keys grouped with their full posting lists, before probability pruning.
// Groups longer than the hard recurrence cap are already dropped: no
// (model, rho) can keep them.
struct CandidateGroups {
  std::vector<IndexEntry> entries;  // index order, p unset
  IndexStats stats;
  std::size_t hard_cap = kDefaultHardRecurrenceCap;
};

// Extraction (parallel over record chunks) followed by a sort-based
// group-by on the key. `records` must be sorted by id.
inline CandidateGroups group_candidates(std::span<const Record> records, const TemplateSet& templates,
                                        std::size_t threads = 1,
                                        std::size_t hard_cap = kDefaultHardRecurrenceCap) {
  struct Row {
    std::uint64_t hash;
    std::uint64_t offset;  // into the key arena
    std::uint32_t length;
    RecordId id;
  };
  struct Partial {
    std::string arena;
    std::vector<Row> rows;
    std::size_t skipped = 0;
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, records.size()));
  std::vector<Partial> partials(workers);
  parallel_chunks(records.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t w) {
    auto& part = partials[w];
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t t = 0; t < templates.templates().size(); ++t) {
        auto ex = templates.extract(t, records[i]);
        if (ex.skipped) ++part.skipped;
        for (const auto& k : ex.keys) {
          part.rows.push_back({key_hash(k), part.arena.size(), static_cast<std::uint32_t>(k.size()), records[i].id});
          part.arena += k;
        }
      }
    }
  });

  CandidateGroups out;
  out.hard_cap = hard_cap;
  std::string arena;
  std::vector<Row> rows;
  std::size_t total_rows = 0, total_chars = 0;
  for (const auto& p : partials) {
    total_rows += p.rows.size();
    total_chars += p.arena.size();
  }
  rows.reserve(total_rows);
  arena.reserve(total_chars);
  for (auto& p : partials) {
    out.stats.skipped_record_templates += p.skipped;
    const std::uint64_t base = arena.size();
    for (auto r : p.rows) {
      r.offset += base;
      rows.push_back(r);
    }
    arena += p.arena;
    p = Partial{};
  }
  out.stats.candidate_signatures = rows.size();

  auto key_of = [&](const Row& r) { return std::string_view(arena).substr(r.offset, r.length); };
  std::sort(rows.begin(), rows.end(), [&](const Row& x, const Row& y) {
    if (x.hash != y.hash) return x.hash < y.hash;
    if (const int c = key_of(x).compare(key_of(y)); c != 0) return c < 0;
    return x.id < y.id;
  });

  const char sep = templates.key_format().part_sep;
  for (std::size_t i = 0; i < rows.size();) {
    const auto key = key_of(rows[i]);
    std::size_t j = i + 1;
    while (j < rows.size() && rows[j].hash == rows[i].hash && key_of(rows[j]) == key) ++j;
    ++out.stats.total_keys_seen;
    if (j - i <= hard_cap) {
      IndexEntry e;
      e.key = std::string(key);
      e.template_id = std::stoi(e.key.substr(0, e.key.find(sep)));
      e.postings.reserve(j - i);
      for (std::size_t k = i; k < j; ++k) e.postings.push_back(rows[k].id);
      out.entries.push_back(std::move(e));
    } else {
      ++out.stats.keys_pruned_by_rho;
    }
    i = j;
  }
  return out;
}

// Applies the recurrence cap for (model, rho) and attaches probabilities.
inline InvertedIndex prune(CandidateGroups&& groups, const ProbabilityModel& model, double rho) {
  const auto cap = max_recurrence(model, rho, groups.hard_cap);
  IndexStats stats = groups.stats;
  stats.recurrence_cap = cap.k;
  stats.hit_hard_cap = cap.hit_hard_cap;
  std::vector<IndexEntry> kept;
  kept.reserve(groups.entries.size());
  for (auto& e : groups.entries) {
    if (e.postings.size() > cap.k) {
      ++stats.keys_pruned_by_rho;
      continue;
    }
    e.p = signature_probability(model, e.postings.size());
    stats.max_posting_len = std::max(stats.max_posting_len, e.postings.size());
    kept.push_back(std::move(e));
  }
  groups.entries.clear();
  return {std::move(kept), stats};
}

inline InvertedIndex prune(const CandidateGroups& groups, const ProbabilityModel& model, double rho) {
  return prune(CandidateGroups(groups), model, rho);
}

// Builds I = {(s, R_s, p_s)} keeping only candidates with p_s > rho.
inline InvertedIndex build_index(std::span<const Record> records, const TemplateSet& templates,
                                 const ProbabilityModel& model, double rho, std::size_t threads = 1,
                                 std::size_t hard_cap = kDefaultHardRecurrenceCap) {
  model.validate();
  (void)max_recurrence(model, rho, hard_cap);  // reject bad rho before extraction
  return prune(group_candidates(records, templates, threads, hard_cap), model, rho);
}

// True iff `s` is a subsequence of `t`.
inline bool subrecord_of(std::span<const Token> s, std::span<const Token> t) {
  std::size_t i = 0;
  for (std::size_t j = 0; i < s.size() && j < t.size(); ++j)
    if (s[i] == t[j]) ++i;
  return i == s.size();
}

inline std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", p);
  return buf;
}

// Diagnostic dump: key<TAB>p<TAB>id,id,id per line, ordered by key.
inline void dump_index(const InvertedIndex& index, std::ostream& out) {
  std::vector<const IndexEntry*> by_key;
  by_key.reserve(index.size());
  for (const auto& e : index.entries()) by_key.push_back(&e);
  std::sort(by_key.begin(), by_key.end(), [](const IndexEntry* x, const IndexEntry* y) { return x->key < y->key; });
  for (const auto* ep : by_key) {
    const auto& e = *ep;
    out << e.key << '\t' << format_probability(e.p) << '\t';
    for (std::size_t i = 0; i < e.postings.size(); ++i) {
      if (i) out << ',';
      out << e.postings[i];
    }
    out << '\n';
  }
}

}  // namespace psig

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "psig/cc.hpp"
#include "psig/config.hpp"
#include "psig/csv.hpp"
#include "psig/dataset.hpp"
#include "psig/indexer.hpp"
#include "psig/linker.hpp"

namespace psig {

// Matched pairs over original ids, stored (smaller, larger), sorted.
struct GroundTruth {
  std::vector<std::pair<RecordId, RecordId>> pairs;

  static GroundTruth from_pairs(std::vector<std::pair<RecordId, RecordId>> raw) {
    GroundTruth t;
    for (auto [u, v] : raw) {
      if (u == v) throw DataError("ground truth contains the self-pair (" + std::to_string(u) + "," +
                                  std::to_string(v) + ")");
      t.pairs.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(t.pairs.begin(), t.pairs.end());
    t.pairs.erase(std::unique(t.pairs.begin(), t.pairs.end()), t.pairs.end());
    return t;
  }
};

// Reads `id_a,id_b` rows of native keys. For two sources the first column
// names records of A and the second records of B; for one source both
// columns resolve against it. A native key shared by several rows of one
// source stands for all of them.
inline GroundTruth load_truth(const TruthConfig& tc, const Dataset& ds, bool two_source) {
  std::unordered_map<std::string, std::vector<RecordId>> keys_a, keys_b;
  for (const auto& r : ds.originals) {
    auto& m = (two_source && r.source == Source::B) ? keys_b : keys_a;
    m[r.key].push_back(r.id);
  }
  const auto& col_b_keys = two_source ? keys_b : keys_a;

  std::ifstream in(tc.path, std::ios::binary);
  if (!in) throw DataError("cannot open ground truth " + tc.path.string());
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw DataError(tc.path.string() + ": missing header row");
  if (!row.empty() && row[0].rfind("\xEF\xBB\xBF", 0) == 0) row[0].erase(0, 3);
  auto col = [&](const std::string& name) {
    auto it = std::find(row.begin(), row.end(), name);
    if (it == row.end()) throw DataError(tc.path.string() + ": header is missing column '" + name + "'");
    return static_cast<std::size_t>(it - row.begin());
  };
  const auto ca = col(tc.column_a);
  const auto cb = col(tc.column_b);
  const auto arity = row.size();
  std::vector<std::pair<RecordId, RecordId>> raw;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != arity)
      throw DataError(tc.path.string() + ": line " + std::to_string(reader.line()) + ": wrong number of fields");
    auto ia = keys_a.find(row[ca]);
    if (ia == keys_a.end()) throw DataError("ground truth references unknown id '" + row[ca] + "'");
    auto ib = col_b_keys.find(row[cb]);
    if (ib == col_b_keys.end()) throw DataError("ground truth references unknown id '" + row[cb] + "'");
    if (!two_source && row[ca] == row[cb])
      throw DataError("ground truth contains the self-pair (" + row[ca] + "," + row[cb] + ")");
    for (auto u : ia->second)
      for (auto v : ib->second)
        if (u != v) raw.emplace_back(u, v);
  }
  return GroundTruth::from_pairs(std::move(raw));
}

struct Metrics {
  std::uint64_t true_positives = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;

  static Metrics from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
    Metrics m{tp, fp, fn, 0.0, 0.0, 0.0};
    if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (m.precision + m.recall > 0) m.f_measure = 2 * m.precision * m.recall / (m.precision + m.recall);
    return m;
  }
};

enum class PairScope { CrossSource, All };

// Pairwise evaluation of a clustering. Predicted pairs are all pairs
// sharing a label (cross-source pairs only under CrossSource); they are
// counted per cluster, never enumerated.
inline Metrics evaluate(const Labelling& clusters, const GroundTruth& truth, PairScope scope,
                        const std::function<Source(RecordId)>& source_of) {
  std::map<RecordId, std::pair<std::uint64_t, std::uint64_t>> sizes;  // label -> (A or all, B)
  for (auto [id, label] : clusters.entries()) {
    auto& s = sizes[label];
    if (scope == PairScope::CrossSource && source_of(id) == Source::B) ++s.second;
    else ++s.first;
  }
  std::uint64_t predicted = 0;
  for (const auto& [label, s] : sizes)
    predicted += scope == PairScope::CrossSource ? s.first * s.second : s.first * (s.first - 1) / 2;

  std::uint64_t tp = 0;
  for (auto [u, v] : truth.pairs) {
    auto lu = clusters.find(u);
    if (!lu) throw DataError("ground truth references id " + std::to_string(u) + " missing from the clustering");
    auto lv = clusters.find(v);
    if (!lv) throw DataError("ground truth references id " + std::to_string(v) + " missing from the clustering");
    if (*lu != *lv) continue;
    if (scope == PairScope::CrossSource && source_of(u) == source_of(v)) continue;
    ++tp;
  }
  return Metrics::from_counts(tp, predicted - tp, truth.pairs.size() - tp);
}

// Expands a labelling of canonical records to every original record.
inline Labelling expand_to_originals(const Labelling& canonical, const Dataset& ds) {
  std::vector<std::pair<RecordId, RecordId>> out;
  out.reserve(ds.originals.size());
  for (const auto& r : ds.originals) out.emplace_back(r.id, canonical.label(ds.alias.at(r.id)));
  return Labelling(std::move(out));
}

inline Labelling cluster_links(std::span<const Link> links, const Dataset& ds, ComponentsTrace* trace = nullptr) {
  EdgeList edges;
  edges.reserve(links.size());
  for (const auto& l : links) edges.push_back({l.r_i, l.r_j});
  std::sort(edges.begin(), edges.end());
  return expand_to_originals(connected_components(edges, ds.canonical_ids, trace), ds);
}

struct GridCell {
  ProbabilityModel model;
  double rho = 0.0;
  double tau = 0.0;
  Metrics metrics;
  std::size_t links = 0;
  double seconds = 0.0;
};

struct GridResult {
  std::vector<GridCell> cells;  // grid order: a, b, rho, tau (tau fastest)
  std::size_t best = 0;

  const GridCell& best_cell() const { return cells.at(best); }
};

// Higher F, then higher precision, then lower tau; earlier cells win ties.
inline bool better_cell(const GridCell& x, const GridCell& y) {
  if (x.metrics.f_measure != y.metrics.f_measure) return x.metrics.f_measure > y.metrics.f_measure;
  if (x.metrics.precision != y.metrics.precision) return x.metrics.precision > y.metrics.precision;
  return x.tau < y.tau;
}

struct GridOptions {
  LinkOptions link;
  std::string verifier = "none";
  std::size_t hard_k_cap = kDefaultHardRecurrenceCap;
};

// Exhaustive search. Extraction and grouping run once; pruning and
// scoring run once per (a, b, rho); only finalisation, clustering and
// evaluation repeat per tau.
inline GridResult grid_search(const Dataset& ds, const TemplateSet& templates, const GridSpec& grid,
                              const GroundTruth& truth, const GridOptions& opt) {
  if (grid.cells() == 0) throw ConfigError("grid search needs at least one value per parameter");
  using clock = std::chrono::steady_clock;
  const auto verifier = VerifierRegistry::instance().make(opt.verifier);
  const PairScope scope = opt.link.cross_source_only ? PairScope::CrossSource : PairScope::All;
  auto source_of = [&](RecordId id) { return ds.source_of(id); };

  auto groups = group_candidates(ds.canonical.records(), templates, opt.link.threads, opt.hard_k_cap);
  // Single-posting keys never produce a pair.
  std::erase_if(groups.entries, [](const IndexEntry& e) { return e.postings.size() < 2; });

  GridResult result;
  for (double a : grid.a)
    for (double b : grid.b)
      for (double rho : grid.rho) {
        const auto t0 = clock::now();
        const ProbabilityModel model{a, b};
        const auto index = prune(groups, model, rho);
        const auto scored = score_pairs(index, ds.canonical, templates, opt.link);
        const double shared = std::chrono::duration<double>(clock::now() - t0).count();
        for (double tau : grid.tau) {
          const auto t1 = clock::now();
          const auto links = finalize(scored, tau, verifier ? &*verifier : nullptr, &ds.canonical);
          const auto clusters = cluster_links(links, ds);
          GridCell cell{model, rho, tau, evaluate(clusters, truth, scope, source_of), links.size(), 0.0};
          cell.seconds = shared / static_cast<double>(grid.tau.size()) +
                         std::chrono::duration<double>(clock::now() - t1).count();
          result.cells.push_back(cell);
        }
      }
  for (std::size_t i = 1; i < result.cells.size(); ++i)
    if (better_cell(result.cells[i], result.cells[result.best])) result.best = i;
  return result;
}

}  // namespace psig

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psig/common.hpp"

namespace psig {

// (parent, child) with parent < child.
struct Edge {
  RecordId parent = 0;
  RecordId child = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeList = std::vector<Edge>;

// Orients every pair smaller-first, drops self-loops and duplicates.
inline EdgeList normalize_edges(std::span<const std::pair<RecordId, RecordId>> pairs) {
  EdgeList out;
  out.reserve(pairs.size());
  for (auto [u, v] : pairs) {
    if (u == v) continue;
    out.push_back(u < v ? Edge{u, v} : Edge{v, u});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Sorted record-id -> component-label map.
class Labelling {
 public:
  Labelling() = default;
  explicit Labelling(std::vector<std::pair<RecordId, RecordId>> labels) : labels_(std::move(labels)) {
    std::sort(labels_.begin(), labels_.end());
  }

  std::optional<RecordId> find(RecordId id) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), std::pair<RecordId, RecordId>{id, 0});
    if (it == labels_.end() || it->first != id) return std::nullopt;
    return it->second;
  }
  RecordId label(RecordId id) const {
    auto l = find(id);
    if (!l) throw InvariantError("record " + std::to_string(id) + " has no label");
    return *l;
  }

  const std::vector<std::pair<RecordId, RecordId>>& entries() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

  std::size_t component_count() const {
    std::size_t n = 0;
    for (auto [id, l] : labels_) n += (id == l);
    return n;
  }

  // Adds self-labels for ids not yet present.
  void cover(std::span<const RecordId> universe) {
    const std::size_t before = labels_.size();
    for (auto id : universe)
      if (!std::binary_search(labels_.begin(), labels_.begin() + static_cast<std::ptrdiff_t>(before),
                              std::pair<RecordId, RecordId>{id, 0},
                              [](const auto& x, const auto& y) { return x.first < y.first; }))
        labels_.emplace_back(id, id);
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
  }

  friend bool operator==(const Labelling&, const Labelling&) = default;

 private:
  std::vector<std::pair<RecordId, RecordId>> labels_;
};

inline std::uint64_t parent_id_sum(const EdgeList& edges) {
  std::uint64_t s = 0;
  for (const auto& e : edges) s += e.parent;
  return s;
}

struct ForestTrace {
  std::size_t rounds = 0;
  std::vector<std::uint64_t> parent_sums;  // before round 1, then after each round
};

// Min-parent rewriting: for every node with parents e1..ei, replace its
// incoming edges by (e*, child), (e*, e1), ..., (e*, ei) where e* is the
// smallest parent. Rounds are synchronous over a snapshot grouped by child;
// stops when every child has a single parent.
inline EdgeList to_forest(EdgeList edges, ForestTrace* trace = nullptr) {
  for (const auto& e : edges)
    if (e.parent >= e.child) throw InvariantError("to_forest: edges must satisfy parent < child");
  auto by_child = [](const Edge& x, const Edge& y) {
    return x.child != y.child ? x.child < y.child : x.parent < y.parent;
  };
  std::sort(edges.begin(), edges.end(), by_child);
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (trace) {
    *trace = {};
    trace->parent_sums.push_back(parent_id_sum(edges));
  }

  EdgeList next;
  while (true) {
    bool multi = false;
    next.clear();
    next.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size();) {
      std::size_t j = i;
      while (j < edges.size() && edges[j].child == edges[i].child) ++j;
      const RecordId root = edges[i].parent;  // sorted: smallest parent first
      next.push_back({root, edges[i].child});
      for (std::size_t k = i + 1; k < j; ++k) {
        multi = true;
        next.push_back({root, edges[k].parent});
      }
      i = j;
    }
    if (!multi) break;
    std::sort(next.begin(), next.end(), by_child);
    next.erase(std::unique(next.begin(), next.end()), next.end());
    edges.swap(next);
    if (trace) {
      ++trace->rounds;
      trace->parent_sums.push_back(parent_id_sum(edges));
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

struct FlattenTrace {
  std::size_t rounds = 0;  // rounds that rewrote at least one edge
  std::size_t passes = 0;  // including the final no-change pass
};

// Pointer jumping: (ei,ej),(ej,ek) => (ei,ej),(ei,ek), repeated until every
// tree has height one. Each pass is a self-join of the parent column against
// the child column.
inline Labelling flatten(EdgeList forest, FlattenTrace* trace = nullptr) {
  auto by_child = [](const Edge& x, const Edge& y) { return x.child < y.child; };
  std::sort(forest.begin(), forest.end(), by_child);
  for (std::size_t i = 0; i < forest.size(); ++i) {
    if (forest[i].parent >= forest[i].child)
      throw InvariantError("flatten: edge (" + std::to_string(forest[i].parent) + "," +
                           std::to_string(forest[i].child) + ") violates parent < child");
    if (i > 0 && forest[i - 1].child == forest[i].child)
      throw InvariantError("flatten: node " + std::to_string(forest[i].child) + " has more than one parent");
  }
  if (trace) *trace = {};

  std::vector<RecordId> jumped(forest.size());
  while (true) {
    if (trace) ++trace->passes;
    bool changed = false;
    for (std::size_t i = 0; i < forest.size(); ++i) {
      const RecordId p = forest[i].parent;
      auto it = std::lower_bound(forest.begin(), forest.end(), Edge{0, p}, by_child);
      if (it != forest.end() && it->child == p) {
        jumped[i] = it->parent;
        changed = true;
      } else {
        jumped[i] = p;
      }
    }
    if (!changed) break;
    for (std::size_t i = 0; i < forest.size(); ++i) forest[i].parent = jumped[i];
    if (trace) ++trace->rounds;
  }

  std::vector<std::pair<RecordId, RecordId>> labels;
  labels.reserve(forest.size() * 2);
  for (const auto& e : forest) {
    labels.emplace_back(e.child, e.parent);
    labels.emplace_back(e.parent, e.parent);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return Labelling(std::move(labels));
}

struct ComponentsTrace {
  ForestTrace forest;
  FlattenTrace flatten;
};

// Labels every component with its smallest id. Ids in `universe` that touch
// no edge become singletons.
inline Labelling connected_components(const EdgeList& edges, std::span<const RecordId> universe = {},
                                      ComponentsTrace* trace = nullptr) {
  auto labels = flatten(to_forest(edges, trace ? &trace->forest : nullptr), trace ? &trace->flatten : nullptr);
  if (!universe.empty()) labels.cover(universe);
  return labels;
}

// Union-find reference with min-id labels.
inline Labelling oracle_components(const EdgeList& edges, std::span<const RecordId> universe = {}) {
  std::vector<RecordId> ids(universe.begin(), universe.end());
  for (const auto& e : edges) {
    ids.push_back(e.parent);
    ids.push_back(e.child);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto index = [&](RecordId id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  std::vector<std::size_t> parent(ids.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& e : edges) {
    auto a = find(index(e.parent));
    auto b = find(index(e.child));
    if (a == b) continue;
    // Indexes are id-ordered, so the smaller index is the smaller id.
    if (a < b) parent[b] = a;
    else parent[a] = b;
  }
  std::vector<std::pair<RecordId, RecordId>> labels;
  labels.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) labels.emplace_back(ids[i], ids[find(i)]);
  return Labelling(std::move(labels));
}

}  // namespace psig

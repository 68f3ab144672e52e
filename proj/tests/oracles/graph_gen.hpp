#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "psig/cc.hpp"

// Seeded random graphs mixing stars, chains, cliques, random forests and
// sparse noise over shuffled ids.
namespace oracle {

struct Graph {
  psig::EdgeList edges;
  std::vector<psig::RecordId> universe;
};

inline Graph random_graph(std::mt19937_64& rng, std::size_t max_nodes) {
  const std::size_t n = 2 + rng() % (max_nodes - 1);
  std::vector<psig::RecordId> ids(n);
  std::iota(ids.begin(), ids.end(), psig::RecordId{1});
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<std::pair<psig::RecordId, psig::RecordId>> pairs;
  std::size_t pos = 0;
  while (pos < n) {
    const std::size_t remaining = n - pos;
    std::size_t size = 1 + rng() % std::min<std::size_t>(remaining, 1 + rng() % 400);
    if (size > remaining) size = remaining;
    const psig::RecordId* g = ids.data() + pos;
    switch (rng() % 6) {
      case 0:  // star
        for (std::size_t i = 1; i < size; ++i) pairs.emplace_back(g[0], g[i]);
        break;
      case 1:  // chain
        for (std::size_t i = 1; i < size; ++i) pairs.emplace_back(g[i - 1], g[i]);
        break;
      case 2: {  // clique, bounded
        const std::size_t m = std::min<std::size_t>(size, 40);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(g[i], g[j]);
        for (std::size_t i = m; i < size; ++i) pairs.emplace_back(g[i], g[rng() % m]);
        break;
      }
      case 3:  // random tree
        for (std::size_t i = 1; i < size; ++i) pairs.emplace_back(g[i], g[rng() % i]);
        break;
      case 4: {  // sparse random, possibly disconnected
        const std::size_t m = size + rng() % (size + 1);
        for (std::size_t i = 0; i < m && size > 1; ++i) pairs.emplace_back(g[rng() % size], g[rng() % size]);
        break;
      }
      default:  // isolated nodes
        break;
    }
    pos += size;
  }
  Graph out;
  out.edges = psig::normalize_edges(pairs);
  out.universe = ids;
  std::sort(out.universe.begin(), out.universe.end());
  return out;
}

// Height of a forest given as (parent, child) edges.
inline std::size_t forest_height(const psig::EdgeList& forest) {
  std::vector<std::pair<psig::RecordId, psig::RecordId>> by_child;
  for (const auto& e : forest) by_child.emplace_back(e.child, e.parent);
  std::sort(by_child.begin(), by_child.end());
  std::size_t h = 0;
  // Depth via memoised walk in ascending id order: parents are smaller.
  std::vector<std::size_t> depth(by_child.size(), 0);
  for (std::size_t i = 0; i < by_child.size(); ++i) {
    const auto p = by_child[i].second;
    auto it = std::lower_bound(by_child.begin(), by_child.end(), std::make_pair(p, psig::RecordId{0}));
    depth[i] = 1 + ((it != by_child.end() && it->first == p) ? depth[static_cast<std::size_t>(it - by_child.begin())] : 0);
    h = std::max(h, depth[i]);
  }
  return h;
}

}  // namespace oracle

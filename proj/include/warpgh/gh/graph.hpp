#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "warpgh/core/error.hpp"
#include "warpgh/core/parallel.hpp"

namespace warpgh::gh {

/// Undirected weighted graph as adjacency lists.
struct WeightedGraph {
  std::vector<std::vector<std::pair<uint32_t, double>>> adj;

  explicit WeightedGraph(size_t n = 0) : adj(n) {}
  size_t size() const { return adj.size(); }

  void add_edge(size_t u, size_t v, double w) {
    adj.at(u).emplace_back(static_cast<uint32_t>(v), w);
    adj.at(v).emplace_back(static_cast<uint32_t>(u), w);
  }

  template <class Emit>
  void neighbors(size_t u, Emit&& emit) const {
    for (const auto& [v, w] : adj[u]) emit(static_cast<size_t>(v), w);
  }
};

/// Single-source Dijkstra over any graph exposing neighbors(u, emit(v, w)).
template <class Graph>
void dijkstra(const Graph& g, size_t n, size_t src, double* out) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) out[i] = inf;
  using Item = std::pair<double, size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  out[src] = 0.0;
  pq.emplace(0.0, src);
  while (!pq.empty()) {
    const auto [du, u] = pq.top();
    pq.pop();
    if (du > out[u]) continue;
    g.neighbors(u, [&](size_t v, double w) {
      const double nd = du + w;
      if (nd < out[v]) {
        out[v] = nd;
        pq.emplace(nd, v);
      }
    });
  }
}

/**
 * @brief Dense all-pairs shortest paths, one Dijkstra per source, rows written in parallel.
 *
 * Rows are symmetrized by taking the min of (i,j) and (j,i) to absorb rounding.
 * Throws Validation if the graph is disconnected.
 */
template <class Graph>
std::vector<double> all_pairs(const Graph& g, size_t n, unsigned threads = 1) {
  std::vector<double> d(n * n);
  parallel_for(n, threads, [&](size_t i) { dijkstra(g, n, i, d.data() + i * n); });
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double v = std::min(d[i * n + j], d[j * n + i]);
      if (v == std::numeric_limits<double>::infinity())
        fail(ErrorKind::Validation, "gh_lab", "all_pairs", "graph is disconnected");
      d[i * n + j] = d[j * n + i] = v;
    }
  }
  return d;
}

}  // namespace warpgh::gh

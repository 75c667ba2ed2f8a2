#include "cycprop/graph.hpp"

#include <algorithm>
#include <string>

#include "cycprop/errors.hpp"

namespace cycprop {

Graph Graph::from_edges(std::span<const Edge> edges, NodeId node_count) {
  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [u, v] = edges[k];
    if (u >= node_count || v >= node_count) {
      throw InputError("edge #" + std::to_string(k) + " (" + std::to_string(u) + ", " +
                       std::to_string(v) + ") has an endpoint outside [0, " +
                       std::to_string(node_count) + ")");
    }
    if (u == v) continue;
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Graph g;
  g.offsets_.assign(static_cast<std::size_t>(node_count) + 1, 0);
  g.indices_.reserve(directed.size());
  for (const auto& [u, v] : directed) {
    ++g.offsets_[u + 1];
    g.indices_.push_back(v);
  }
  for (std::size_t i = 1; i < g.offsets_.size(); ++i) g.offsets_[i] += g.offsets_[i - 1];
  return g;
}

std::size_t Graph::slot(NodeId u, NodeId v) const {
  const auto row = neighbors(u);
  const auto it = std::lower_bound(row.begin(), row.end(), v);
  if (it == row.end() || *it != v) return npos;
  return offsets_[u] + static_cast<std::size_t>(it - row.begin());
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  return u < node_count() && v < node_count() && slot(u, v) != npos;
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

void sample_neighbors(const Graph& g, NodeId v, std::size_t count, RandomSource& rng,
                      std::vector<NodeId>& out) {
  out.clear();
  const auto row = g.neighbors(v);
  if (row.empty() || count == 0) return;
  if (row.size() < count) {
    for (std::size_t k = 0; k < count; ++k) out.push_back(row[rng.below(row.size())]);
    return;
  }
  // Partial Fisher-Yates.
  std::vector<NodeId> pool(row.begin(), row.end());
  for (std::size_t k = 0; k < count; ++k) {
    const auto j = k + rng.below(pool.size() - k);
    std::swap(pool[k], pool[j]);
    out.push_back(pool[k]);
  }
}

}  // namespace cycprop

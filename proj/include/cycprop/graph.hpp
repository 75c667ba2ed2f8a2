#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cycprop/random.hpp"

namespace cycprop {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Immutable undirected simple graph in CSR form. Every undirected edge is
// stored in both endpoint rows; each row is sorted ascending.
class Graph {
 public:
  Graph() : offsets_{0} {}

  // Drops self-loops and merges duplicates / reversed copies. Throws
  // InputError naming the first edge with an endpoint outside [0, n).
  static Graph from_edges(std::span<const Edge> edges, NodeId node_count);

  NodeId node_count() const { return static_cast<NodeId>(offsets_.size() - 1); }
  // Number of undirected edges.
  std::size_t edge_count() const { return indices_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {indices_.data() + offsets_[v], indices_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(NodeId u, NodeId v) const;

  // Position of v inside row u of the CSR index array, or npos.
  std::size_t slot(NodeId u, NodeId v) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const NodeId> indices() const { return indices_; }

  // Canonical edge list: one (u, v) with u < v per edge, lexicographic order.
  std::vector<Edge> edge_list() const;

  bool operator==(const Graph&) const = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> indices_;
};

// Neighbors drawn for one aggregation: `count` ids, with replacement when the
// degree is below `count`, otherwise without. Empty for isolated nodes.
void sample_neighbors(const Graph& g, NodeId v, std::size_t count, RandomSource& rng,
                      std::vector<NodeId>& out);

}  // namespace cycprop

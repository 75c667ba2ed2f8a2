#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cycprop/graph.hpp"
#include "cycprop/random.hpp"

namespace cycprop {

// Vose alias table over indices [0, size). O(1) sampling.
class AliasTable {
 public:
  AliasTable() = default;
  // Weights must be finite and non-negative with a positive sum.
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  bool empty() const { return prob_.empty(); }
  std::size_t sample(RandomSource& rng) const;

  // Normalized probability of index i as given at construction.
  double probability(std::size_t i) const { return normalized_[i]; }
  double total_weight() const { return total_; }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
  std::vector<double> normalized_;
  double total_ = 0.0;
};

// Unigram noise distribution for negative sampling: P(v) ∝ degree(v)^{3/4}.
// Isolated nodes get probability zero.
class NoiseDistribution {
 public:
  static constexpr double kExponent = 0.75;

  // Throws InputError when the graph has no edges.
  explicit NoiseDistribution(const Graph& g);

  NodeId sample(RandomSource& rng) const { return static_cast<NodeId>(table_.sample(rng)); }
  double probability(NodeId v) const { return table_.probability(v); }
  // Un-normalized d^{3/4}; used to build restricted pools.
  double weight(NodeId v) const { return weights_[v]; }
  double normalizer() const { return table_.total_weight(); }
  std::size_t size() const { return weights_.size(); }

 private:
  std::vector<double> weights_;
  AliasTable table_;
};

}  // namespace cycprop

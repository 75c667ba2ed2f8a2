#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cycprop/graph.hpp"
#include "cycprop/noise.hpp"
#include "cycprop/random.hpp"

namespace cycprop {

struct ContextPair {
  NodeId anchor;
  NodeId context;
  std::int8_t polarity;  // +1 positive context, -1 negative context
  bool operator==(const ContextPair&) const = default;
};

// Label-context candidates: nodes with phi = 1 grouped by hard label, plus a
// degree^{3/4}-weighted negative pool per class covering the candidates of
// every other class.
class LabelContextIndex {
 public:
  LabelContextIndex() = default;

  std::size_t class_count() const { return members_.size(); }
  std::span<const NodeId> members(std::int32_t cls) const { return members_[cls]; }
  std::span<const NodeId> candidates() const { return candidates_; }
  std::int32_t label_of(NodeId v) const { return label_[v]; }
  bool empty() const { return candidates_.empty(); }

  // Negative pool for anchors of class `cls`; empty when no weighted
  // candidate of another class exists.
  bool has_negatives(std::int32_t cls) const { return !negative_tables_[cls].empty(); }
  NodeId sample_negative(std::int32_t cls, RandomSource& rng) const {
    return negative_pools_[cls][negative_tables_[cls].sample(rng)];
  }
  std::span<const NodeId> negative_pool(std::int32_t cls) const { return negative_pools_[cls]; }

  friend LabelContextIndex rebuild_label_index(std::span<const std::uint8_t> phi,
                                               std::span<const std::int32_t> hard_labels,
                                               std::int32_t class_count,
                                               const NoiseDistribution& noise);

 private:
  std::vector<std::vector<NodeId>> members_;
  std::vector<NodeId> candidates_;
  std::vector<std::int32_t> label_;  // -1 for non-candidates
  std::vector<std::vector<NodeId>> negative_pools_;
  std::vector<AliasTable> negative_tables_;
};

LabelContextIndex rebuild_label_index(std::span<const std::uint8_t> phi,
                                      std::span<const std::int32_t> hard_labels,
                                      std::int32_t class_count, const NoiseDistribution& noise);

struct SamplerOptions {
  double r = 0.5;           // probability of the structure branch
  int negatives = 10;       // s_neg
  int anchors = 512;        // B
  int label_retries = 8;    // label-branch attempts before structure fallback
};

struct ContextBatch {
  std::vector<ContextPair> pairs;
  std::size_t structure_anchors = 0;  // including fallbacks
  std::size_t label_anchors = 0;
  std::size_t fallbacks = 0;
};

// Draws `anchors` positive pairs, each followed by `negatives` negative
// pairs with the same anchor. Structure anchors pick a uniformly random
// edge (anchor, neighbor) and take negatives from the noise distribution.
// Label anchors pick a uniform candidate, a same-label positive and
// different-label negatives from the restricted noise distribution.
ContextBatch sample_batch(const Graph& g, const LabelContextIndex& index,
                          const NoiseDistribution& noise, const SamplerOptions& opts,
                          RandomSource& rng);

}  // namespace cycprop

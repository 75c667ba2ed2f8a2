#include "cycprop/sampler.hpp"

#include <algorithm>

#include "cycprop/errors.hpp"

namespace cycprop {

LabelContextIndex rebuild_label_index(std::span<const std::uint8_t> phi,
                                      std::span<const std::int32_t> hard_labels,
                                      std::int32_t class_count, const NoiseDistribution& noise) {
  if (phi.size() != hard_labels.size()) {
    throw InputError("indicator and label vectors differ in length");
  }
  LabelContextIndex idx;
  idx.members_.assign(class_count, {});
  idx.label_.assign(phi.size(), -1);
  for (std::size_t v = 0; v < phi.size(); ++v) {
    if (!phi[v]) continue;
    const auto cls = hard_labels[v];
    if (cls < 0 || cls >= class_count) {
      throw InputError("hard label " + std::to_string(cls) + " of node " + std::to_string(v) +
                       " outside [0, " + std::to_string(class_count) + ")");
    }
    idx.members_[cls].push_back(static_cast<NodeId>(v));
    idx.candidates_.push_back(static_cast<NodeId>(v));
    idx.label_[v] = cls;
  }

  idx.negative_pools_.assign(class_count, {});
  idx.negative_tables_.assign(class_count, {});
  std::vector<double> weights;
  for (std::int32_t k = 0; k < class_count; ++k) {
    if (idx.members_[k].empty()) continue;  // never an anchor class
    auto& pool = idx.negative_pools_[k];
    weights.clear();
    double total = 0.0;
    for (auto v : idx.candidates_) {
      if (idx.label_[v] == k) continue;
      pool.push_back(v);
      weights.push_back(noise.weight(v));
      total += weights.back();
    }
    if (total > 0.0) idx.negative_tables_[k] = AliasTable(weights);
  }
  return idx;
}

namespace {

NodeId edge_source(const Graph& g, std::size_t slot) {
  const auto offsets = g.offsets();
  const auto it = std::upper_bound(offsets.begin(), offsets.end(), slot);
  return static_cast<NodeId>((it - offsets.begin()) - 1);
}

void structure_context(const Graph& g, const NoiseDistribution& noise, int negatives,
                       RandomSource& rng, std::vector<ContextPair>& out) {
  const auto slot = static_cast<std::size_t>(rng.below(g.indices().size()));
  const NodeId anchor = edge_source(g, slot);
  out.push_back({anchor, g.indices()[slot], +1});
  for (int s = 0; s < negatives; ++s) out.push_back({anchor, noise.sample(rng), -1});
}

bool label_context(const LabelContextIndex& index, int negatives, RandomSource& rng,
                   std::vector<ContextPair>& out) {
  const auto cands = index.candidates();
  const NodeId anchor = cands[rng.below(cands.size())];
  const auto cls = index.label_of(anchor);
  const auto same = index.members(cls);
  if (same.size() < 2 || !index.has_negatives(cls)) return false;
  NodeId positive = anchor;
  while (positive == anchor) positive = same[rng.below(same.size())];
  out.push_back({anchor, positive, +1});
  for (int s = 0; s < negatives; ++s) out.push_back({anchor, index.sample_negative(cls, rng), -1});
  return true;
}

}  // namespace

ContextBatch sample_batch(const Graph& g, const LabelContextIndex& index,
                          const NoiseDistribution& noise, const SamplerOptions& opts,
                          RandomSource& rng) {
  if (g.edge_count() == 0) throw InputError("context sampling needs at least one edge");
  if (opts.r < 1.0 && index.empty()) {
    throw InputError("label-context branch is reachable but no node has phi = 1");
  }
  ContextBatch batch;
  batch.pairs.reserve(static_cast<std::size_t>(opts.anchors) * (1 + opts.negatives));
  for (int a = 0; a < opts.anchors; ++a) {
    if (rng.uniform() < opts.r) {
      structure_context(g, noise, opts.negatives, rng, batch.pairs);
      ++batch.structure_anchors;
      continue;
    }
    bool drawn = false;
    for (int attempt = 0; attempt < opts.label_retries && !drawn; ++attempt) {
      drawn = label_context(index, opts.negatives, rng, batch.pairs);
    }
    if (drawn) {
      ++batch.label_anchors;
    } else {
      structure_context(g, noise, opts.negatives, rng, batch.pairs);
      ++batch.structure_anchors;
      ++batch.fallbacks;
    }
  }
  return batch;
}

}  // namespace cycprop

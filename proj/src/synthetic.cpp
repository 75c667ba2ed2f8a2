#include "cycprop/synthetic.hpp"

#include <algorithm>

#include "cycprop/errors.hpp"
#include "cycprop/random.hpp"

namespace cycprop {

Dataset make_sbm(const SbmOptions& opts) {
  const auto k = static_cast<std::uint32_t>(opts.block_sizes.size());
  if (k == 0 || opts.vocabulary < k || opts.words_per_node > opts.vocabulary) {
    throw InputError("SBM needs at least one block and a vocabulary of at least one word per class");
  }
  if (opts.signal >= 1.0 && opts.words_per_node > opts.vocabulary / k) {
    throw InputError("words_per_node exceeds the class vocabulary slice with signal = 1");
  }
  RandomSource rng(opts.seed);
  Dataset data;
  std::vector<std::int32_t> block;
  for (std::uint32_t b = 0; b < k; ++b) block.insert(block.end(), opts.block_sizes[b], b);
  const auto n = static_cast<NodeId>(block.size());

  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.bernoulli(block[u] == block[v] ? opts.p_in : opts.p_out)) edges.emplace_back(u, v);
    }
  }
  data.graph = Graph::from_edges(edges, n);

  const std::uint32_t slice = opts.vocabulary / k;
  for (NodeId v = 0; v < n; ++v) {
    std::vector<std::uint32_t> words;
    while (words.size() < opts.words_per_node) {
      const auto w = rng.bernoulli(opts.signal)
                         ? static_cast<std::uint32_t>(block[v] * slice + rng.below(slice))
                         : static_cast<std::uint32_t>(rng.below(opts.vocabulary));
      if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
    }
    std::vector<AttributeMatrix::Entry> row;
    for (auto w : words) row.push_back({w, 1.0});
    data.attributes.append_row(std::move(row));
  }
  data.attributes.set_cols(opts.vocabulary);
  data.labels = block;
  data.class_count = static_cast<std::int32_t>(k);
  data.external_ids.resize(n);
  for (NodeId v = 0; v < n; ++v) data.external_ids[v] = v;
  return data;
}

}  // namespace cycprop

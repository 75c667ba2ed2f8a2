#pragma once

#include <cstdint>
#include <vector>

#include "cycprop/dataset.hpp"

namespace cycprop {

// Planted-partition graph with bag-of-words style attributes. Each class
// owns an equal slice of the vocabulary; a node draws `words_per_node`
// distinct columns, each from its own class slice with probability
// `signal` and uniformly from the whole vocabulary otherwise.
struct SbmOptions {
  std::vector<NodeId> block_sizes = {50, 50};
  double p_in = 0.1;
  double p_out = 0.005;
  std::uint32_t vocabulary = 20;
  std::uint32_t words_per_node = 5;
  double signal = 0.5;
  std::uint64_t seed = 0;
};

// Every node is labeled with its block; external ids are 0..n-1.
Dataset make_sbm(const SbmOptions& opts);

}  // namespace cycprop

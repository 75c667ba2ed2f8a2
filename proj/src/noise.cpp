#include "cycprop/noise.hpp"

#include <algorithm>
#include <cmath>

#include "cycprop/errors.hpp"

namespace cycprop {

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  total_ = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw InputError("alias table weights must be finite and >= 0");
    total_ += w;
  }
  if (n == 0 || total_ <= 0.0) throw InputError("alias table needs a positive total weight");

  normalized_.resize(n);
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    normalized_[i] = weights[i] / total_;
    scaled[i] = normalized_[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    large.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  // Leftovers are 1 up to rounding. A zero-weight leftover (possible only
  // through rounding) must still never be returned.
  const auto heaviest = static_cast<std::size_t>(
      std::max_element(weights.begin(), weights.end()) - weights.begin());
  for (auto* rest : {&large, &small}) {
    for (auto i : *rest) {
      const bool positive = weights[i] > 0.0;
      prob_[i] = positive ? 1.0 : 0.0;
      alias_[i] = positive ? i : heaviest;
    }
  }
}

std::size_t AliasTable::sample(RandomSource& rng) const {
  const auto column = static_cast<std::size_t>(rng.below(prob_.size()));
  return rng.uniform() < prob_[column] ? column : alias_[column];
}

NoiseDistribution::NoiseDistribution(const Graph& g) {
  if (g.edge_count() == 0) {
    throw InputError("noise distribution needs at least one edge (all nodes are isolated)");
  }
  weights_.resize(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    weights_[v] = std::pow(static_cast<double>(g.degree(v)), kExponent);
  }
  table_ = AliasTable(weights_);
}

}  // namespace cycprop

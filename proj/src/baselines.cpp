#include "cycprop/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "cycprop/errors.hpp"

namespace cycprop {

void BaselineConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("beta must be in (0, 1)");
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be > 0");
  if (max_iters < 0) throw ValidationError("max_iters must be >= 0");
  if (delta_raw && !(*delta_raw > 0.0)) throw ValidationError("delta_raw must be > 0");
}

std::vector<std::int32_t> known_labels(const LabelSplit& split) {
  std::vector<std::int32_t> known(split.labels.size(), kUnlabeled);
  for (auto v : split.train) known[v] = split.labels[v];
  return known;
}

namespace {

void check_known(std::span<const std::int32_t> known, std::size_t n, std::int32_t k) {
  if (known.size() != n) throw InputError("label vector length differs from node count");
  bool any = false;
  for (auto c : known) {
    if (c == kUnlabeled) continue;
    if (c < 0 || c >= k) throw InputError("known class outside [0, K)");
    any = true;
  }
  if (!any) throw InputError("label propagation needs at least one labeled node");
}

}  // namespace

BaselineResult gfhf_propagate(const WeightedGraph& w, std::span<const std::int32_t> known,
                              std::int32_t class_count, const BaselineConfig& cfg) {
  cfg.validate();
  const auto& g = w.graph;
  const auto n = g.node_count();
  check_known(known, n, class_count);

  BaselineResult res;
  res.delta = w.delta;
  res.f = LabelDistribution::Constant(n, class_count, 1.0 / class_count);

  std::vector<std::uint8_t> reached(n, 0);
  std::deque<NodeId> queue;
  for (NodeId v = 0; v < n; ++v) {
    if (known[v] == kUnlabeled) continue;
    res.f.row(v).setZero();
    res.f(v, known[v]) = 1.0;
    reached[v] = 1;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    const auto row = g.neighbors(u);
    const auto wr = w.row_weights(u);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (wr[k] > 0.0 && !reached[row[k]]) {
        reached[row[k]] = 1;
        queue.push_back(row[k]);
      }
    }
  }
  std::vector<NodeId> free_nodes;
  for (NodeId v = 0; v < n; ++v) {
    if (known[v] == kUnlabeled && reached[v]) free_nodes.push_back(v);
  }

  LabelDistribution next = res.f;
  for (int it = 0; it < cfg.max_iters; ++it) {
    double change = 0.0;
    for (auto v : free_nodes) {
      const auto row = g.neighbors(v);
      const auto wr = w.row_weights(v);
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(class_count);
      double total = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) {
        acc += wr[k] * res.f.row(row[k]);
        total += wr[k];
      }
      next.row(v) = acc / total;
      change = std::max(change, (next.row(v) - res.f.row(v)).lpNorm<Eigen::Infinity>());
    }
    for (auto v : free_nodes) res.f.row(v) = next.row(v);
    res.iterations = it + 1;
    res.residuals.push_back(change);
    if (change < cfg.tolerance) {
      res.converged = true;
      break;
    }
  }
  if (free_nodes.empty()) res.converged = true;
  return res;
}

BaselineResult llgc_propagate(const WeightedGraph& w, std::span<const std::int32_t> known,
                              std::int32_t class_count, const BaselineConfig& cfg) {
  cfg.validate();
  const auto& g = w.graph;
  const auto n = g.node_count();
  check_known(known, n, class_count);

  BaselineResult res;
  res.delta = w.delta;
  LabelDistribution y0 = LabelDistribution::Zero(n, class_count);
  for (NodeId v = 0; v < n; ++v) {
    if (known[v] != kUnlabeled) y0(v, known[v]) = 1.0;
  }
  std::vector<double> inv_sqrt_deg(n, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    double d = 0.0;
    for (double x : w.row_weights(v)) d += x;
    inv_sqrt_deg[v] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }

  LabelDistribution f = y0;
  LabelDistribution next(n, class_count);
  for (int it = 0; it < cfg.max_iters; ++it) {
    for (NodeId v = 0; v < n; ++v) {
      const auto row = g.neighbors(v);
      const auto wr = w.row_weights(v);
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(class_count);
      for (std::size_t k = 0; k < row.size(); ++k) {
        acc += (wr[k] * inv_sqrt_deg[row[k]]) * f.row(row[k]);
      }
      next.row(v) = cfg.beta * inv_sqrt_deg[v] * acc + (1.0 - cfg.beta) * y0.row(v);
    }
    const double change = (next - f).lpNorm<Eigen::Infinity>();
    f.swap(next);
    res.iterations = it + 1;
    res.residuals.push_back(change);
    if (change < cfg.tolerance) {
      res.converged = true;
      break;
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    const double total = f.row(v).sum();
    if (total > 0.0) {
      f.row(v) /= total;
    } else {
      f.row(v).setConstant(1.0 / class_count);
    }
  }
  res.f = std::move(f);
  return res;
}

namespace {

WeightedGraph raw_weights(const Graph& g, const AttributeMatrix& x, const BaselineConfig& cfg) {
  if (cfg.delta_raw) return compute_weights(x, g, *cfg.delta_raw, DeltaMode::fixed);
  return compute_weights(x, g, 0.0, DeltaMode::median);
}

}  // namespace

BaselineResult run_gfhf(const Graph& g, const AttributeMatrix& x, const LabelSplit& split,
                        const BaselineConfig& cfg) {
  return gfhf_propagate(raw_weights(g, x, cfg), known_labels(split), split.class_count, cfg);
}

BaselineResult run_llgc(const Graph& g, const AttributeMatrix& x, const LabelSplit& split,
                        const BaselineConfig& cfg) {
  return llgc_propagate(raw_weights(g, x, cfg), known_labels(split), split.class_count, cfg);
}

BaselineResult run_baseline(const Graph& g, const AttributeMatrix& x, const LabelSplit& split,
                            const BaselineConfig& cfg) {
  return cfg.method == BaselineMethod::gfhf ? run_gfhf(g, x, split, cfg)
                                            : run_llgc(g, x, split, cfg);
}

}  // namespace cycprop

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cycprop/dataset.hpp"
#include "cycprop/propagation.hpp"

namespace cycprop {

enum class BaselineMethod { gfhf, llgc };

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::gfhf;
  double beta = 0.99;                // LLGC propagation coefficient, in (0, 1)
  std::optional<double> delta_raw;   // unset: median heuristic on raw attributes
  int max_iters = 1000;
  double tolerance = 1e-6;

  void validate() const;
};

struct BaselineResult {
  LabelDistribution f;
  int iterations = 0;
  bool converged = false;
  double delta = 0.0;
  std::vector<double> residuals;  // L-infinity change per iteration
};

// Harmonic-function propagation over fixed weights. Known rows are clamped
// to their one-hot labels; every other node reachable from a known node
// through positive-weight edges iterates f_i <- sum_j w_ij f_j / sum_j w_ij
// (Jacobi) until the L-infinity change drops below tolerance. Unreachable
// nodes keep uniform rows.
BaselineResult gfhf_propagate(const WeightedGraph& w, std::span<const std::int32_t> known,
                              std::int32_t class_count, const BaselineConfig& cfg);

// Local-and-global-consistency iteration F <- beta S F + (1 - beta) Y0 with
// S = D^{-1/2} W D^{-1/2}; rows are then rescaled to sum to one (uniform when
// a row is all zero).
BaselineResult llgc_propagate(const WeightedGraph& w, std::span<const std::int32_t> known,
                              std::int32_t class_count, const BaselineConfig& cfg);

// Both baselines on raw-attribute kernel weights restricted to graph edges,
// with the training split as the known labels.
BaselineResult run_gfhf(const Graph& g, const AttributeMatrix& x, const LabelSplit& split,
                        const BaselineConfig& cfg);
BaselineResult run_llgc(const Graph& g, const AttributeMatrix& x, const LabelSplit& split,
                        const BaselineConfig& cfg);
BaselineResult run_baseline(const Graph& g, const AttributeMatrix& x, const LabelSplit& split,
                            const BaselineConfig& cfg);

// Training labels of a split as a length-n vector (kUnlabeled elsewhere).
std::vector<std::int32_t> known_labels(const LabelSplit& split);

}  // namespace cycprop

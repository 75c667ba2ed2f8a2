#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cycprop/config.hpp"
#include "cycprop/dataset.hpp"
#include "cycprop/encoder.hpp"
#include "cycprop/graph.hpp"

namespace cycprop {

// n x K, one class distribution per row.
using LabelDistribution = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Gaussian-kernel weights on the edges of `graph`, aligned with
// graph.indices(): weights[k] belongs to the k-th stored (row, neighbor).
struct WeightedGraph {
  Graph graph;
  std::vector<double> weights;
  double delta = 0.0;

  std::span<const double> row_weights(NodeId v) const {
    const auto off = graph.offsets();
    return {weights.data() + off[v], weights.data() + off[v + 1]};
  }
};

// Squared distances, one per undirected edge in Graph::edge_list() order.
std::vector<double> edge_squared_distances(const Graph& g, const EmbeddingMatrix& e);
std::vector<double> edge_squared_distances(const Graph& g, const AttributeMatrix& x);

// Median of the edge distances (not squared), floored at 1e-6.
double median_heuristic_delta(std::span<const double> squared_distances);

// s_ij = exp(-d_ij^2 / (2 delta^2)), computed once per edge and mirrored.
WeightedGraph kernel_weights(const Graph& g, std::span<const double> squared_distances,
                             double delta);

WeightedGraph compute_weights(const EmbeddingMatrix& e, const Graph& g, double delta,
                              DeltaMode mode = DeltaMode::fixed);
WeightedGraph compute_weights(const AttributeMatrix& x, const Graph& g, double delta,
                              DeltaMode mode = DeltaMode::fixed);

// Shannon entropy (natural log, 0 log 0 = 0).
double entropy(std::span<const double> f);

// Euclidean projection onto {f >= 0, sum f = 1} by the sort-and-threshold
// method. Input already within 1e-12 of the simplex is copied through
// unchanged. `out` may alias `z`.
void simplex_project(std::span<const double> z, std::span<double> out);
std::vector<double> simplex_project(std::span<const double> z);

// Inputs shared by the objective, gradient and step. `known` holds the
// training class of each node or kUnlabeled; `phi` is the 0/1 indicator.
struct LpTerms {
  const WeightedGraph& weights;
  std::span<const std::int32_t> known;
  std::span<const std::uint8_t> phi;
  double mu;
};

// Smoothness over undirected edges (each counted once) + mu * fitness on
// known nodes + sum phi_i H(f_i) - lambda * sum phi_i. Throws ContractError
// when a row of F is off the simplex.
double lp_objective(const LabelDistribution& f, const LpTerms& terms, double lambda);

// Gradient of lp_objective with respect to row i; log f is clamped at
// log(1e-12).
Eigen::VectorXd lp_gradient(const LabelDistribution& f, const LpTerms& terms, NodeId i);

// One synchronous proximal-gradient sweep: every row moves against its
// gradient at the pre-step F and is projected back onto the simplex.
LabelDistribution lp_step(const LabelDistribution& f, const LpTerms& terms, double lr);

// phi_i = [H(f_i) <= lambda], forced to 1 on the training mask.
std::vector<std::uint8_t> update_indicator(const LabelDistribution& f, double lambda,
                                           const std::vector<bool>& labeled_mask);

// Throws ContractError unless every row is on the simplex within tol.
void require_feasible(const LabelDistribution& f, double tol = 1e-9);

// Argmax per row, ties to the lowest class index.
std::vector<std::int32_t> hard_labels(const LabelDistribution& f);

}  // namespace cycprop

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cycprop/dataset.hpp"
#include "cycprop/graph.hpp"
#include "cycprop/random.hpp"
#include "cycprop/sampler.hpp"

namespace cycprop {

using EmbeddingMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Two-layer mean-concat aggregator:
//   h1_v = ReLU(W1 [x_v ; mean_{u in S1(v)} x_u] + b1)
//   e_v  = normalize(W2 [h1_v ; mean_{u in S2(v)} h1_u] + b2)
// with an optional ReLU before the normalization (output_relu). W1 is hidden x 2m and W2 is d x 2*hidden; the left half of each acts on
// the node itself, the right half on the neighbor mean.
struct EncoderParams {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
  bool output_relu = false;

  Eigen::Index input_dim() const { return w1.cols() / 2; }
  Eigen::Index hidden_dim() const { return w1.rows(); }
  Eigen::Index output_dim() const { return w2.rows(); }
  bool all_finite() const;

  static EncoderParams zeros_like(const EncoderParams& p);
  // this += scale * other
  void axpy(double scale, const EncoderParams& other);
  std::size_t parameter_count() const;
  // Flat view used by gradient checks; order: w1, b1, w2, b2 (column-major).
  double& at(std::size_t flat);
  double at(std::size_t flat) const;
};

// Glorot-uniform weights, zero biases; deterministic per seed.
EncoderParams init_params(int input_dim, int hidden_dim, int output_dim, std::uint64_t seed,
                          bool output_relu = false);

// Which neighbors feed each aggregation of a forward pass. Layer-2 nodes are
// the embedded targets; layer-1 nodes are the targets plus their layer-2
// neighbors. Each node gets one neighbor list per layer, so a node shared
// between targets has a single hidden representation.
struct ComputePlan {
  std::vector<NodeId> targets;           // sorted, unique
  std::vector<NodeId> hidden;            // sorted, unique; superset of targets
  std::vector<std::uint32_t> target_slot;  // index of targets[i] in hidden
  // CSR over targets: neighbors as indices into `hidden`.
  std::vector<std::size_t> target_offsets;
  std::vector<std::uint32_t> target_neighbors;
  // CSR over hidden: neighbors as node ids.
  std::vector<std::size_t> hidden_offsets;
  std::vector<NodeId> hidden_neighbors;
};

// Fixed-size sampled neighborhoods (GraphSAGE style).
ComputePlan plan_sampled(const Graph& g, std::span<const NodeId> targets, std::size_t sample_size,
                         RandomSource& rng);
// Full neighborhoods; deterministic.
ComputePlan plan_full(const Graph& g, std::span<const NodeId> targets);

// Embeddings of plan.targets, one row per target in plan order.
EmbeddingMatrix forward(const EncoderParams& params, const AttributeMatrix& x,
                        const ComputePlan& plan);

// Embedding of one node. With rng == nullptr the full neighborhood is used.
Eigen::VectorXd embed_node(const EncoderParams& params, const Graph& g, const AttributeMatrix& x,
                           NodeId v, std::size_t sample_size, RandomSource* rng = nullptr);

// Full-neighborhood embeddings of every node; row i belongs to node i.
EmbeddingMatrix embed_all(const EncoderParams& params, const Graph& g, const AttributeMatrix& x);

// Mean over pairs of -log sigma(polarity * <e_context, e_anchor>), with sigma
// clamped to at least 1e-12. Rows of `embeddings` are indexed by node id.
double context_loss(const EmbeddingMatrix& embeddings, std::span<const ContextPair> pairs);

struct BatchGradient {
  double loss = 0.0;
  EncoderParams grad;
};

// Context loss of `pairs` under `plan` (which must cover every node in the
// pairs) and its gradient with respect to all parameters.
BatchGradient batch_gradient(const EncoderParams& params, const AttributeMatrix& x,
                             std::span<const ContextPair> pairs, const ComputePlan& plan);
double batch_loss(const EncoderParams& params, const AttributeMatrix& x,
                  std::span<const ContextPair> pairs, const ComputePlan& plan);

// Sorted unique node ids mentioned by the pairs.
std::vector<NodeId> batch_nodes(std::span<const ContextPair> pairs);

// One SGD step on a freshly sampled plan for the batch. Returns the batch
// loss before the update. Throws TrainingError on a non-finite loss or
// gradient, leaving params untouched.
double train_step(EncoderParams& params, const Graph& g, const AttributeMatrix& x,
                  std::span<const ContextPair> pairs, double lr, std::size_t sample_size,
                  RandomSource& rng);

}  // namespace cycprop

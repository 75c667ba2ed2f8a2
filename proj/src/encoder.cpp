#include "cycprop/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "cycprop/errors.hpp"

namespace cycprop {

namespace {

constexpr double kNormFloor = 1e-12;
constexpr double kSigmoidFloor = 1e-12;

std::size_t find_sorted(std::span<const NodeId> sorted, NodeId v) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) -
                                  sorted.begin());
}

std::vector<NodeId> sorted_unique(std::vector<NodeId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Layer-1 inputs plus every intermediate needed by the backward pass.
struct Forward {
  std::vector<NodeId> sources;            // unique neighbor ids feeding layer 1
  std::vector<std::uint32_t> source_slot;  // per hidden_neighbors entry
  Eigen::MatrixXd a1, h1;                  // hidden_dim x |hidden|
  Eigen::MatrixXd self2, mean2;            // hidden_dim x |targets|
  Eigen::MatrixXd a2, e;                   // d x |targets|
  Eigen::VectorXd norms;
};

template <typename Fn>
void for_each_entry(const AttributeMatrix& x, NodeId v, Fn&& fn) {
  for (const auto& entry : x.row(v)) fn(entry.column, entry.value);
}

Forward run_forward(const EncoderParams& p, const AttributeMatrix& x, const ComputePlan& plan) {
  const auto m = p.input_dim();
  const auto hd = p.hidden_dim();
  const auto nh = static_cast<Eigen::Index>(plan.hidden.size());
  const auto nt = static_cast<Eigen::Index>(plan.targets.size());
  if (static_cast<Eigen::Index>(x.cols()) > m) {
    throw InputError("attribute width " + std::to_string(x.cols()) +
                     " exceeds encoder input width " + std::to_string(m));
  }

  Forward f;
  f.sources = sorted_unique(plan.hidden_neighbors);
  f.source_slot.resize(plan.hidden_neighbors.size());
  for (std::size_t k = 0; k < plan.hidden_neighbors.size(); ++k) {
    f.source_slot[k] = static_cast<std::uint32_t>(find_sorted(f.sources, plan.hidden_neighbors[k]));
  }

  // W1_neighbor x_u for every source node.
  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(hd, static_cast<Eigen::Index>(f.sources.size()));
  for (std::size_t s = 0; s < f.sources.size(); ++s) {
    for_each_entry(x, f.sources[s], [&](std::uint32_t c, double v) {
      proj.col(static_cast<Eigen::Index>(s)).noalias() += v * p.w1.col(m + c);
    });
  }

  f.a1.resize(hd, nh);
  for (Eigen::Index h = 0; h < nh; ++h) {
    auto col = f.a1.col(h);
    col = p.b1;
    for_each_entry(x, plan.hidden[h], [&](std::uint32_t c, double v) {
      col.noalias() += v * p.w1.col(c);
    });
    const auto begin = plan.hidden_offsets[h];
    const auto end = plan.hidden_offsets[h + 1];
    if (end > begin) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(hd);
      for (auto k = begin; k < end; ++k) acc += proj.col(f.source_slot[k]);
      col.noalias() += acc / static_cast<double>(end - begin);
    }
  }
  f.h1 = f.a1.cwiseMax(0.0);

  f.self2.resize(hd, nt);
  f.mean2 = Eigen::MatrixXd::Zero(hd, nt);
  for (Eigen::Index t = 0; t < nt; ++t) {
    f.self2.col(t) = f.h1.col(plan.target_slot[t]);
    const auto begin = plan.target_offsets[t];
    const auto end = plan.target_offsets[t + 1];
    if (end == begin) continue;
    auto col = f.mean2.col(t);
    for (auto k = begin; k < end; ++k) col += f.h1.col(plan.target_neighbors[k]);
    col /= static_cast<double>(end - begin);
  }

  f.a2.noalias() = p.w2.leftCols(hd) * f.self2;
  f.a2.noalias() += p.w2.rightCols(hd) * f.mean2;
  f.a2.colwise() += p.b2;
  f.e = p.output_relu ? Eigen::MatrixXd(f.a2.cwiseMax(0.0)) : f.a2;
  f.norms.resize(nt);
  for (Eigen::Index t = 0; t < nt; ++t) {
    const double norm = f.e.col(t).norm();
    f.norms[t] = norm;
    if (norm > kNormFloor) {
      f.e.col(t) /= norm;
    } else {
      f.e.col(t).setZero();
    }
  }
  return f;
}

EncoderParams run_backward(const EncoderParams& p, const AttributeMatrix& x,
                           const ComputePlan& plan, const Forward& f, const Eigen::MatrixXd& de) {
  const auto m = p.input_dim();
  const auto hd = p.hidden_dim();
  const auto nt = static_cast<Eigen::Index>(plan.targets.size());
  const auto nh = static_cast<Eigen::Index>(plan.hidden.size());
  EncoderParams g = EncoderParams::zeros_like(p);

  // Through the L2 normalization and the optional output ReLU.
  Eigen::MatrixXd da2 = Eigen::MatrixXd::Zero(p.output_dim(), nt);
  for (Eigen::Index t = 0; t < nt; ++t) {
    if (f.norms[t] <= kNormFloor) continue;
    const auto e = f.e.col(t);
    const auto d = de.col(t);
    da2.col(t) = (d - e * e.dot(d)) / f.norms[t];
  }
  if (p.output_relu) da2 = (f.a2.array() > 0.0).select(da2, 0.0);

  g.w2.leftCols(hd).noalias() = da2 * f.self2.transpose();
  g.w2.rightCols(hd).noalias() = da2 * f.mean2.transpose();
  g.b2 = da2.rowwise().sum();

  const Eigen::MatrixXd dself = p.w2.leftCols(hd).transpose() * da2;
  const Eigen::MatrixXd dmean = p.w2.rightCols(hd).transpose() * da2;
  Eigen::MatrixXd dh1 = Eigen::MatrixXd::Zero(hd, nh);
  for (Eigen::Index t = 0; t < nt; ++t) {
    dh1.col(plan.target_slot[t]) += dself.col(t);
    const auto begin = plan.target_offsets[t];
    const auto end = plan.target_offsets[t + 1];
    if (end == begin) continue;
    const Eigen::VectorXd share = dmean.col(t) / static_cast<double>(end - begin);
    for (auto k = begin; k < end; ++k) dh1.col(plan.target_neighbors[k]) += share;
  }
  const Eigen::MatrixXd da1 = (f.a1.array() > 0.0).select(dh1, 0.0);
  g.b1 = da1.rowwise().sum();

  Eigen::MatrixXd dsource = Eigen::MatrixXd::Zero(hd, static_cast<Eigen::Index>(f.sources.size()));
  for (Eigen::Index h = 0; h < nh; ++h) {
    const auto col = da1.col(h);
    for_each_entry(x, plan.hidden[h], [&](std::uint32_t c, double v) {
      g.w1.col(c).noalias() += v * col;
    });
    const auto begin = plan.hidden_offsets[h];
    const auto end = plan.hidden_offsets[h + 1];
    if (end == begin) continue;
    const Eigen::VectorXd share = col / static_cast<double>(end - begin);
    for (auto k = begin; k < end; ++k) dsource.col(f.source_slot[k]) += share;
  }
  for (std::size_t s = 0; s < f.sources.size(); ++s) {
    const auto col = dsource.col(static_cast<Eigen::Index>(s));
    for_each_entry(x, f.sources[s], [&](std::uint32_t c, double v) {
      g.w1.col(m + c).noalias() += v * col;
    });
  }
  return g;
}

// -log sigma(z) and its derivative, with sigma floored at kSigmoidFloor.
std::pair<double, double> neg_log_sigmoid(double z) {
  const double sig = 1.0 / (1.0 + std::exp(-z));
  if (sig < kSigmoidFloor) return {-std::log(kSigmoidFloor), 0.0};
  const double loss = z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
  return {loss, -(1.0 - sig)};
}

}  // namespace

bool EncoderParams::all_finite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

EncoderParams EncoderParams::zeros_like(const EncoderParams& p) {
  return {Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols()), Eigen::VectorXd::Zero(p.b1.size()),
          Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols()), Eigen::VectorXd::Zero(p.b2.size()),
          p.output_relu};
}

void EncoderParams::axpy(double scale, const EncoderParams& other) {
  w1.noalias() += scale * other.w1;
  b1.noalias() += scale * other.b1;
  w2.noalias() += scale * other.w2;
  b2.noalias() += scale * other.b2;
}

std::size_t EncoderParams::parameter_count() const {
  return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size());
}

double& EncoderParams::at(std::size_t flat) {
  auto k = static_cast<Eigen::Index>(flat);
  if (k < w1.size()) return w1.data()[k];
  k -= w1.size();
  if (k < b1.size()) return b1.data()[k];
  k -= b1.size();
  if (k < w2.size()) return w2.data()[k];
  k -= w2.size();
  return b2.data()[k];
}

double EncoderParams::at(std::size_t flat) const {
  return const_cast<EncoderParams*>(this)->at(flat);
}

EncoderParams init_params(int input_dim, int hidden_dim, int output_dim, std::uint64_t seed,
                          bool output_relu) {
  RandomSource rng(seed);
  auto glorot = [&](Eigen::Index rows, Eigen::Index cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = rng.uniform(-limit, limit);
    return w;
  };
  EncoderParams p;
  p.w1 = glorot(hidden_dim, 2 * static_cast<Eigen::Index>(input_dim));
  p.b1 = Eigen::VectorXd::Zero(hidden_dim);
  p.w2 = glorot(output_dim, 2 * static_cast<Eigen::Index>(hidden_dim));
  p.b2 = Eigen::VectorXd::Zero(output_dim);
  p.output_relu = output_relu;
  return p;
}

namespace {

template <typename NeighborFn>
ComputePlan build_plan(std::span<const NodeId> targets, NeighborFn&& neighbors_of) {
  ComputePlan plan;
  plan.targets = sorted_unique({targets.begin(), targets.end()});

  std::vector<NodeId> buf;
  std::vector<NodeId> target_nbr_ids;
  plan.target_offsets.push_back(0);
  std::vector<NodeId> hidden = plan.targets;
  for (auto t : plan.targets) {
    neighbors_of(t, buf);
    target_nbr_ids.insert(target_nbr_ids.end(), buf.begin(), buf.end());
    hidden.insert(hidden.end(), buf.begin(), buf.end());
    plan.target_offsets.push_back(target_nbr_ids.size());
  }
  plan.hidden = sorted_unique(std::move(hidden));
  for (auto t : plan.targets) {
    plan.target_slot.push_back(static_cast<std::uint32_t>(find_sorted(plan.hidden, t)));
  }
  plan.target_neighbors.reserve(target_nbr_ids.size());
  for (auto v : target_nbr_ids) {
    plan.target_neighbors.push_back(static_cast<std::uint32_t>(find_sorted(plan.hidden, v)));
  }
  plan.hidden_offsets.push_back(0);
  for (auto h : plan.hidden) {
    neighbors_of(h, buf);
    plan.hidden_neighbors.insert(plan.hidden_neighbors.end(), buf.begin(), buf.end());
    plan.hidden_offsets.push_back(plan.hidden_neighbors.size());
  }
  return plan;
}

}  // namespace

ComputePlan plan_sampled(const Graph& g, std::span<const NodeId> targets, std::size_t sample_size,
                         RandomSource& rng) {
  return build_plan(targets, [&](NodeId v, std::vector<NodeId>& out) {
    sample_neighbors(g, v, sample_size, rng, out);
  });
}

ComputePlan plan_full(const Graph& g, std::span<const NodeId> targets) {
  return build_plan(targets, [&](NodeId v, std::vector<NodeId>& out) {
    const auto row = g.neighbors(v);
    out.assign(row.begin(), row.end());
  });
}

EmbeddingMatrix forward(const EncoderParams& params, const AttributeMatrix& x,
                        const ComputePlan& plan) {
  return run_forward(params, x, plan).e.transpose();
}

Eigen::VectorXd embed_node(const EncoderParams& params, const Graph& g, const AttributeMatrix& x,
                           NodeId v, std::size_t sample_size, RandomSource* rng) {
  const NodeId target[] = {v};
  const auto plan = rng ? plan_sampled(g, target, sample_size, *rng) : plan_full(g, target);
  return run_forward(params, x, plan).e.col(0);
}

EmbeddingMatrix embed_all(const EncoderParams& params, const Graph& g, const AttributeMatrix& x) {
  std::vector<NodeId> all(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) all[v] = v;
  return forward(params, x, plan_full(g, all));
}

double context_loss(const EmbeddingMatrix& embeddings, std::span<const ContextPair> pairs) {
  if (pairs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& pair : pairs) {
    const double score = embeddings.row(pair.context).dot(embeddings.row(pair.anchor));
    total += neg_log_sigmoid(pair.polarity * score).first;
  }
  return total / static_cast<double>(pairs.size());
}

std::vector<NodeId> batch_nodes(std::span<const ContextPair> pairs) {
  std::vector<NodeId> nodes;
  nodes.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    nodes.push_back(p.anchor);
    nodes.push_back(p.context);
  }
  return sorted_unique(std::move(nodes));
}

BatchGradient batch_gradient(const EncoderParams& params, const AttributeMatrix& x,
                             std::span<const ContextPair> pairs, const ComputePlan& plan) {
  const Forward f = run_forward(params, x, plan);
  Eigen::MatrixXd de = Eigen::MatrixXd::Zero(f.e.rows(), f.e.cols());
  BatchGradient out;
  if (pairs.empty()) {
    out.grad = EncoderParams::zeros_like(params);
    return out;
  }
  const double inv = 1.0 / static_cast<double>(pairs.size());
  for (const auto& pair : pairs) {
    const auto a = static_cast<Eigen::Index>(find_sorted(plan.targets, pair.anchor));
    const auto c = static_cast<Eigen::Index>(find_sorted(plan.targets, pair.context));
    if (a >= static_cast<Eigen::Index>(plan.targets.size()) || plan.targets[a] != pair.anchor ||
        c >= static_cast<Eigen::Index>(plan.targets.size()) || plan.targets[c] != pair.context) {
      throw InputError("compute plan does not cover every node of the batch");
    }
    const double score = f.e.col(c).dot(f.e.col(a));
    const auto [loss, dz] = neg_log_sigmoid(pair.polarity * score);
    out.loss += loss * inv;
    const double ds = dz * pair.polarity * inv;
    de.col(a) += ds * f.e.col(c);
    de.col(c) += ds * f.e.col(a);
  }
  out.grad = run_backward(params, x, plan, f, de);
  return out;
}

double batch_loss(const EncoderParams& params, const AttributeMatrix& x,
                  std::span<const ContextPair> pairs, const ComputePlan& plan) {
  const Forward f = run_forward(params, x, plan);
  if (pairs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& pair : pairs) {
    const auto a = static_cast<Eigen::Index>(find_sorted(plan.targets, pair.anchor));
    const auto c = static_cast<Eigen::Index>(find_sorted(plan.targets, pair.context));
    total += neg_log_sigmoid(pair.polarity * f.e.col(c).dot(f.e.col(a))).first;
  }
  return total / static_cast<double>(pairs.size());
}

double train_step(EncoderParams& params, const Graph& g, const AttributeMatrix& x,
                  std::span<const ContextPair> pairs, double lr, std::size_t sample_size,
                  RandomSource& rng) {
  const auto nodes = batch_nodes(pairs);
  const auto plan = plan_sampled(g, nodes, sample_size, rng);
  auto step = batch_gradient(params, x, pairs, plan);
  if (!std::isfinite(step.loss) || !step.grad.all_finite()) {
    throw TrainingError("non-finite encoder loss or gradient (loss = " +
                        std::to_string(step.loss) + "); lower lr_enc");
  }
  if (lr != 0.0) params.axpy(-lr, step.grad);
  if (!params.all_finite()) {
    params.axpy(lr, step.grad);
    throw TrainingError("encoder parameters became non-finite; lower lr_enc");
  }
  return step.loss;
}

}  // namespace cycprop

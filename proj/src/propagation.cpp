#include "cycprop/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cycprop/errors.hpp"

namespace cycprop {

namespace {
constexpr double kLogFloor = 1e-12;
constexpr double kDeltaFloor = 1e-6;
}  // namespace

std::vector<double> edge_squared_distances(const Graph& g, const EmbeddingMatrix& e) {
  std::vector<double> out;
  out.reserve(g.edge_count());
  for (const auto& [u, v] : g.edge_list()) out.push_back((e.row(u) - e.row(v)).squaredNorm());
  return out;
}

std::vector<double> edge_squared_distances(const Graph& g, const AttributeMatrix& x) {
  std::vector<double> out;
  out.reserve(g.edge_count());
  for (const auto& [u, v] : g.edge_list()) out.push_back(squared_distance(x.row(u), x.row(v)));
  return out;
}

double median_heuristic_delta(std::span<const double> squared_distances) {
  if (squared_distances.empty()) return kDeltaFloor;
  std::vector<double> d(squared_distances.begin(), squared_distances.end());
  const auto mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  double median = std::sqrt(d[mid]);
  if (d.size() % 2 == 0) {
    const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + std::sqrt(lower));
  }
  return std::max(median, kDeltaFloor);
}

WeightedGraph kernel_weights(const Graph& g, std::span<const double> squared_distances,
                             double delta) {
  if (squared_distances.size() != g.edge_count()) {
    throw InputError("one squared distance per edge expected");
  }
  if (!(delta > 0.0)) throw InputError("kernel length scale must be positive");
  WeightedGraph w{g, std::vector<double>(g.indices().size(), 0.0), delta};
  const double scale = 1.0 / (2.0 * delta * delta);
  std::size_t k = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto row = g.neighbors(u);
    const auto base = g.offsets()[u];
    for (std::size_t j = 0; j < row.size(); ++j) {
      const NodeId v = row[j];
      if (v <= u) continue;
      const double s = std::exp(-squared_distances[k++] * scale);
      w.weights[base + j] = s;
      w.weights[g.slot(v, u)] = s;
    }
  }
  return w;
}

WeightedGraph compute_weights(const EmbeddingMatrix& e, const Graph& g, double delta,
                              DeltaMode mode) {
  const auto sq = edge_squared_distances(g, e);
  return kernel_weights(g, sq, mode == DeltaMode::median ? median_heuristic_delta(sq) : delta);
}

WeightedGraph compute_weights(const AttributeMatrix& x, const Graph& g, double delta,
                              DeltaMode mode) {
  const auto sq = edge_squared_distances(g, x);
  return kernel_weights(g, sq, mode == DeltaMode::median ? median_heuristic_delta(sq) : delta);
}

double entropy(std::span<const double> f) {
  double h = 0.0;
  for (double p : f) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

void simplex_project(std::span<const double> z, std::span<double> out) {
  const std::size_t k = z.size();
  // Points already on the simplex (up to rounding) are returned unchanged.
  double sum = 0.0;
  bool nonneg = true;
  for (double v : z) {
    sum += v;
    nonneg &= v >= 0.0;
  }
  if (nonneg && std::abs(sum - 1.0) <= 1e-12) {
    if (out.data() != z.data()) std::copy(z.begin(), z.end(), out.begin());
    return;
  }
  std::vector<double> u(z.begin(), z.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double prefix = 0.0;
  double eta = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    prefix += u[j];
    const double candidate = (1.0 - prefix) / static_cast<double>(j + 1);
    // rho is the largest j with u_j + candidate > 0; the condition holds on a
    // prefix of the sorted order, so the last hit wins.
    if (u[j] + candidate > 0.0) eta = candidate;
  }
  for (std::size_t i = 0; i < k; ++i) out[i] = std::max(z[i] + eta, 0.0);
}

std::vector<double> simplex_project(std::span<const double> z) {
  std::vector<double> out(z.size());
  simplex_project(z, out);
  return out;
}

void require_feasible(const LabelDistribution& f, double tol) {
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    const auto row = f.row(i);
    if (!row.allFinite() || row.minCoeff() < -tol || std::abs(row.sum() - 1.0) > tol) {
      throw ContractError("row " + std::to_string(i) + " of F is not on the probability simplex");
    }
  }
}

namespace {

std::span<const double> row_span(const LabelDistribution& f, Eigen::Index i) {
  return {f.data() + i * f.cols(), static_cast<std::size_t>(f.cols())};
}

void check_shapes(const LabelDistribution& f, const LpTerms& t) {
  const auto n = static_cast<std::size_t>(f.rows());
  if (t.weights.graph.node_count() != n || t.known.size() != n || t.phi.size() != n) {
    throw InputError("F, weights, labels and indicator disagree on the node count");
  }
}

}  // namespace

double lp_objective(const LabelDistribution& f, const LpTerms& t, double lambda) {
  check_shapes(f, t);
  require_feasible(f);
  const auto& g = t.weights.graph;
  double smooth = 0.0, fit = 0.0, ent = 0.0, selected = 0.0;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const auto row = g.neighbors(i);
    const auto w = t.weights.row_weights(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] > i) smooth += w[k] * (f.row(i) - f.row(row[k])).squaredNorm();
    }
    if (t.known[i] != kUnlabeled) {
      double sq = f.row(i).squaredNorm();
      const double fy = f(i, t.known[i]);
      sq += 1.0 - 2.0 * fy;  // ||f - y||^2 = ||f||^2 - 2 f_y + 1
      fit += sq;
    }
    if (t.phi[i]) {
      ent += entropy(row_span(f, i));
      selected += 1.0;
    }
  }
  return smooth + t.mu * fit + ent - lambda * selected;
}

Eigen::VectorXd lp_gradient(const LabelDistribution& f, const LpTerms& t, NodeId i) {
  const auto& g = t.weights.graph;
  const auto k = f.cols();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(k);
  const auto row = g.neighbors(i);
  const auto w = t.weights.row_weights(i);
  for (std::size_t j = 0; j < row.size(); ++j) {
    grad += 2.0 * w[j] * (f.row(i) - f.row(row[j])).transpose();
  }
  if (t.known[i] != kUnlabeled) {
    Eigen::VectorXd diff = f.row(i).transpose();
    diff[t.known[i]] -= 1.0;
    grad += 2.0 * t.mu * diff;
  }
  if (t.phi[i]) {
    for (Eigen::Index c = 0; c < k; ++c) grad[c] -= std::log(std::max(f(i, c), kLogFloor)) + 1.0;
  }
  return grad;
}

LabelDistribution lp_step(const LabelDistribution& f, const LpTerms& t, double lr) {
  check_shapes(f, t);
  LabelDistribution next(f.rows(), f.cols());
  std::vector<double> z(static_cast<std::size_t>(f.cols()));
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    const Eigen::VectorXd g = lp_gradient(f, t, static_cast<NodeId>(i));
    for (Eigen::Index c = 0; c < f.cols(); ++c) z[c] = f(i, c) - lr * g[c];
    simplex_project(z, {next.data() + i * f.cols(), z.size()});
  }
  return next;
}

std::vector<std::uint8_t> update_indicator(const LabelDistribution& f, double lambda,
                                           const std::vector<bool>& labeled_mask) {
  std::vector<std::uint8_t> phi(static_cast<std::size_t>(f.rows()), 0);
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    phi[i] = (labeled_mask[i] || entropy(row_span(f, i)) <= lambda) ? 1 : 0;
  }
  return phi;
}

std::vector<std::int32_t> hard_labels(const LabelDistribution& f) {
  std::vector<std::int32_t> out(static_cast<std::size_t>(f.rows()), 0);
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < f.cols(); ++c) {
      if (f(i, c) > f(i, best)) best = c;
    }
    out[i] = static_cast<std::int32_t>(best);
  }
  return out;
}

}  // namespace cycprop

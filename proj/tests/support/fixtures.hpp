#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "cycprop/dataset.hpp"
#include "cycprop/encoder.hpp"
#include "cycprop/graph.hpp"
#include "cycprop/propagation.hpp"
#include "cycprop/random.hpp"

namespace fixtures {

using cycprop::Edge;
using cycprop::Graph;
using cycprop::NodeId;
using cycprop::RandomSource;

inline Graph erdos_renyi(NodeId n, double p, RandomSource& rng) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(edges, n);
}

inline Graph path(NodeId n) {
  std::vector<Edge> edges;
  for (NodeId v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return Graph::from_edges(edges, n);
}

inline cycprop::WeightedGraph random_weights(const Graph& g, RandomSource& rng, double lo = 0.1,
                                             double hi = 1.0) {
  std::vector<double> sq;
  for (std::size_t k = 0; k < g.edge_count(); ++k) sq.push_back(rng.uniform(lo, hi));
  return cycprop::kernel_weights(g, sq, 1.0);
}

inline cycprop::WeightedGraph unit_weights(const Graph& g) {
  std::vector<double> sq(g.edge_count(), 0.0);
  return cycprop::kernel_weights(g, sq, 1.0);
}

// Rows drawn uniformly from the simplex, entries bounded below by `floor`.
inline cycprop::LabelDistribution random_interior(Eigen::Index n, Eigen::Index k, RandomSource& rng,
                                                  double floor = 1e-3) {
  cycprop::LabelDistribution f(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      f(i, c) = -std::log(1.0 - rng.uniform());
      total += f(i, c);
    }
    f.row(i) /= total;
    f.row(i) = f.row(i).array() * (1.0 - k * floor) + floor;
  }
  return f;
}

// Euclidean simplex projection by enumerating every support set and solving
// the equality-constrained problem on it; keeps the feasible candidate with
// the smallest distance.
inline std::vector<double> brute_force_projection(const std::vector<double>& z) {
  const std::size_t k = z.size();
  std::vector<double> best;
  double best_dist = INFINITY;
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (1u << i)) {
        sum += z[i];
        ++count;
      }
    }
    const double shift = (1.0 - sum) / count;
    std::vector<double> x(k, 0.0);
    bool feasible = true;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (1u << i)) {
        x[i] = z[i] + shift;
        if (x[i] < -1e-15) feasible = false;
      }
    }
    if (!feasible) continue;
    double dist = 0.0;
    for (std::size_t i = 0; i < k; ++i) dist += (x[i] - z[i]) * (x[i] - z[i]);
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
    }
  }
  return best;
}

// Harmonic solution F_u = (D_uu - W_uu)^{-1} W_ul Y_l by a dense solve.
inline Eigen::MatrixXd dense_harmonic(const cycprop::WeightedGraph& w,
                                      const std::vector<std::int32_t>& known, int k) {
  const auto n = static_cast<Eigen::Index>(w.graph.node_count());
  std::vector<Eigen::Index> unl, lab;
  for (Eigen::Index i = 0; i < n; ++i) (known[i] == cycprop::kUnlabeled ? unl : lab).push_back(i);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (NodeId i = 0; i < w.graph.node_count(); ++i) {
    const auto nb = w.graph.neighbors(i);
    const auto wr = w.row_weights(i);
    for (std::size_t j = 0; j < nb.size(); ++j) W(i, nb[j]) = wr[j];
  }
  const auto nu = static_cast<Eigen::Index>(unl.size());
  Eigen::MatrixXd A(nu, nu), B = Eigen::MatrixXd::Zero(nu, k);
  for (Eigen::Index a = 0; a < nu; ++a) {
    for (Eigen::Index b = 0; b < nu; ++b) A(a, b) = -W(unl[a], unl[b]);
    A(a, a) += W.row(unl[a]).sum();
    for (auto l : lab) B(a, known[l]) += W(unl[a], l);
  }
  const Eigen::MatrixXd fu = A.fullPivLu().solve(B);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, k);
  for (auto l : lab) f(l, known[l]) = 1.0;
  for (Eigen::Index a = 0; a < nu; ++a) f.row(unl[a]) = fu.row(a);
  return f;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    RandomSource rng(std::hash<std::string>{}(tag) ^ static_cast<std::uint64_t>(::getpid()));
    path_ = std::filesystem::temp_directory_path() /
            ("cycprop_" + tag + "_" + std::to_string(rng.next_u64() % 1000000007));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

inline cycprop::AttributeMatrix random_attributes(NodeId n, int m, RandomSource& rng) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(m));
  for (auto& row : rows) {
    for (auto& v : row) v = rng.bernoulli(0.7) ? rng.uniform(-1.0, 1.0) : 0.0;
  }
  return cycprop::AttributeMatrix::from_dense(rows);
}

inline std::vector<cycprop::ContextPair> random_pairs(NodeId n, int count, RandomSource& rng) {
  std::vector<cycprop::ContextPair> pairs;
  for (int k = 0; k < count; ++k) {
    const auto a = static_cast<NodeId>(rng.below(n));
    const auto c = static_cast<NodeId>(rng.below(n));
    pairs.push_back({a, c, static_cast<std::int8_t>(rng.bernoulli(0.4) ? 1 : -1)});
  }
  return pairs;
}

// The propagation objective evaluated term by term with no feasibility
// check, so it can be probed off the simplex.
inline double lp_objective_reference(const cycprop::LabelDistribution& x, const cycprop::LpTerms& t,
                                     double lambda) {
  double smooth = 0, fit = 0, ent = 0, sel = 0;
  const auto& g = t.weights.graph;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto nb = g.neighbors(u);
    const auto wr = t.weights.row_weights(u);
    for (std::size_t j = 0; j < nb.size(); ++j) {
      if (nb[j] > u) smooth += wr[j] * (x.row(u) - x.row(nb[j])).squaredNorm();
    }
    if (t.known[u] != cycprop::kUnlabeled) {
      auto d = x.row(u).eval();
      d[t.known[u]] -= 1.0;
      fit += d.squaredNorm();
    }
    if (t.phi[u]) {
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        if (x(u, c) > 0) ent -= x(u, c) * std::log(x(u, c));
      }
      sel += 1;
    }
  }
  return smooth + t.mu * fit + ent - lambda * sel;
}

}  // namespace fixtures

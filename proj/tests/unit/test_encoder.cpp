#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cycprop/encoder.hpp"
#include "cycprop/errors.hpp"
#include "fixtures.hpp"

using namespace cycprop;

using fixtures::random_attributes;
using fixtures::random_pairs;
using fixtures::relative_error;

TEST_CASE("initialization shapes, determinism and scale") {
  const auto p = init_params(1433, 128, 64, 7);
  CHECK(p.w1.rows() == 128);
  CHECK(p.w1.cols() == 2 * 1433);
  CHECK(p.w2.rows() == 64);
  CHECK(p.w2.cols() == 2 * 128);
  CHECK(p.b1.size() == 128);
  CHECK(p.b2.size() == 64);
  CHECK(p.w1.cwiseAbs().maxCoeff() > 0.0);
  CHECK(p.w1.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / (128 + 2 * 1433)));
  CHECK(p.b1.isZero());
  const auto q = init_params(1433, 128, 64, 7);
  CHECK(p.w1 == q.w1);
  CHECK(p.w2 == q.w2);
  CHECK(p.parameter_count() == 128 * 2866 + 128 + 64 * 256 + 64);
}

TEST_CASE("hand-computed two-layer forward pass") {
  // Nodes 0 and 1 joined by an edge, one attribute each: x0 = 1, x1 = 2.
  const auto g = Graph::from_edges(std::vector<Edge>{{0, 1}}, 2);
  const auto x = AttributeMatrix::from_dense({{1.0}, {2.0}});
  EncoderParams p;
  p.w1.resize(2, 2);
  p.w1 << 1.0, -1.0, 0.5, 0.5;
  p.b1 = Eigen::Vector2d(0.0, 0.1);
  p.w2.resize(2, 4);
  p.w2 << 1.0, 0.5, -1.0, 0.0,
          0.0, 1.0, 0.5, -1.5;
  p.b2 = Eigen::Vector2d(0.5, 0.0);
  // h1_0 = relu(1 - 2, 0.5 + 1 + 0.1) = (0, 1.6); h1_1 = relu(2 - 1, 1 + 0.5 + 0.1) = (1, 1.6)
  // a2_0 = (0.8 - 1 + 0.5, 1.6 + 0.5 - 2.4) = (0.3, -0.3)
  // a2_1 = (1 + 0.8 + 0.5, 1.6 - 2.4) = (2.3, -0.8)
  const auto e = embed_all(p, g, x);
  CHECK(e(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(e(0, 1) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(e(1, 0) == doctest::Approx(2.3 / std::sqrt(5.93)).epsilon(1e-12));
  CHECK(e(1, 1) == doctest::Approx(-0.8 / std::sqrt(5.93)).epsilon(1e-12));

  const auto single = embed_node(p, g, x, 1, 10);
  CHECK(single[0] == doctest::Approx(e(1, 0)).epsilon(1e-14));

  p.output_relu = true;
  const auto r = embed_all(p, g, x);
  CHECK(r(0, 0) == doctest::Approx(1.0));
  CHECK(r(0, 1) == 0.0);
  CHECK(r(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("degenerate nodes embed to exact zeros") {
  const auto g = Graph::from_edges(std::vector<Edge>{{1, 2}}, 3);
  const auto x = AttributeMatrix::from_dense({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  const auto p = init_params(2, 3, 2, 1);
  const auto e = embed_all(p, g, x);
  CHECK(e.row(0).isZero());
  for (int i = 1; i < 3; ++i) CHECK(e.row(i).norm() == doctest::Approx(1.0).epsilon(1e-12));

  // Zero rows contribute no gradient.
  const std::vector<ContextPair> pairs = {{0, 1, 1}, {0, 2, -1}};
  const auto nodes = batch_nodes(pairs);
  const auto plan = plan_full(g, nodes);
  const auto bg = batch_gradient(p, x, pairs, plan);
  CHECK(bg.loss == doctest::Approx(std::log(2.0)));
  CHECK(bg.grad.w1.isZero());
  CHECK(bg.grad.w2.isZero());
}

TEST_CASE("twin nodes share an embedding") {
  // 0 and 1 both connect to 2 and 3 only, with identical attributes.
  const std::vector<Edge> edges = {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 4}};
  const auto g = Graph::from_edges(edges, 5);
  RandomSource rng(3);
  auto x = random_attributes(5, 4, rng);
  std::vector<std::vector<double>> dense(5, std::vector<double>(4, 0.0));
  for (NodeId v = 0; v < 5; ++v) {
    for (const auto& en : x.row(v)) dense[v][en.column] = en.value;
  }
  dense[1] = dense[0];
  x = AttributeMatrix::from_dense(dense);
  const auto p = init_params(4, 6, 3, 2);
  const auto e = embed_all(p, g, x);
  CHECK(e.row(0) == e.row(1));
}

TEST_CASE("embeddings have unit or zero norm") {
  RandomSource rng(17);
  const auto g = fixtures::erdos_renyi(40, 0.1, rng);
  const auto x = random_attributes(40, 6, rng);
  for (bool relu : {false, true}) {
    const auto p = init_params(6, 8, 5, 4, relu);
    const auto e = embed_all(p, g, x);
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
      const double norm = e.row(i).norm();
      CHECK((norm == 0.0 || std::abs(norm - 1.0) < 1e-12));
    }
  }
}

TEST_CASE("embed_all is permutation equivariant") {
  RandomSource rng(5);
  const NodeId n = 25;
  const auto g = fixtures::erdos_renyi(n, 0.15, rng);
  const auto x = random_attributes(n, 5, rng);
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  shuffle(perm, rng);

  std::vector<Edge> edges;
  for (auto [u, v] : g.edge_list()) edges.emplace_back(perm[u], perm[v]);
  const auto pg = Graph::from_edges(edges, n);
  std::vector<std::vector<double>> dense(n, std::vector<double>(5, 0.0));
  for (NodeId v = 0; v < n; ++v) {
    for (const auto& en : x.row(v)) dense[perm[v]][en.column] = en.value;
  }
  const auto px = AttributeMatrix::from_dense(dense);

  const auto p = init_params(5, 7, 4, 9);
  const auto e = embed_all(p, g, x);
  const auto pe = embed_all(p, pg, px);
  for (NodeId v = 0; v < n; ++v) {
    CHECK((e.row(v) - pe.row(perm[v])).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("context loss values") {
  EmbeddingMatrix e(3, 2);
  e << 1.0, 0.0,
       0.0, 1.0,
       std::sqrt(2.0), std::sqrt(2.0);  // dot with itself = 4; with row 0 = sqrt(2)
  const std::vector<ContextPair> orth = {{0, 1, 1}};
  CHECK(context_loss(e, orth) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const std::vector<ContextPair> orth_neg = {{0, 1, -1}};
  CHECK(context_loss(e, orth_neg) == doctest::Approx(0.6931471805599453).epsilon(1e-12));
  EmbeddingMatrix two(2, 1);
  two << 1.0, 2.0;
  const std::vector<ContextPair> score2 = {{0, 1, 1}};
  CHECK(context_loss(two, score2) == doctest::Approx(0.12692801104297263).epsilon(1e-12));
  const std::vector<ContextPair> mixed = {{0, 1, 1}, {0, 1, -1}};
  CHECK(context_loss(two, mixed) ==
        doctest::Approx((std::log1p(std::exp(-2.0)) + std::log1p(std::exp(2.0))) / 2.0));
  EmbeddingMatrix huge(2, 1);
  huge << 100.0, 100.0;
  const std::vector<ContextPair> clamp = {{0, 1, -1}};
  CHECK(context_loss(huge, clamp) == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("analytic gradient matches central differences") {
  RandomSource rng(2718);
  const double h = 1e-5;
  for (int trial = 0; trial < 12; ++trial) {
    const NodeId n = 3 + static_cast<NodeId>(rng.below(6));  // 3..8
    const int m = 1 + static_cast<int>(rng.below(5));
    const int hidden = 1 + static_cast<int>(rng.below(4));
    const int d = 1 + static_cast<int>(rng.below(4));
    const auto g = fixtures::erdos_renyi(n, 0.4, rng);
    const auto x = random_attributes(n, m, rng);
    auto p = init_params(m, hidden, d, rng.next_u64(), trial % 3 == 0);
    for (Eigen::Index k = 0; k < p.b1.size(); ++k) p.b1[k] = rng.uniform(-0.2, 0.4);
    for (Eigen::Index k = 0; k < p.b2.size(); ++k) p.b2[k] = rng.uniform(-0.2, 0.4);
    const auto pairs = random_pairs(n, 12, rng);
    const auto nodes = batch_nodes(pairs);
    RandomSource plan_rng(trial);
    const auto plan = trial % 2 ? plan_full(g, nodes) : plan_sampled(g, nodes, 3, plan_rng);

    const auto analytic = batch_gradient(p, x, pairs, plan);
    CHECK(analytic.loss == doctest::Approx(batch_loss(p, x, pairs, plan)).epsilon(1e-14));
    double worst = 0.0;
    for (std::size_t k = 0; k < p.parameter_count(); ++k) {
      auto plus = p, minus = p;
      plus.at(k) += h;
      minus.at(k) -= h;
      const double numeric = (batch_loss(plus, x, pairs, plan) - batch_loss(minus, x, pairs, plan)) / (2 * h);
      worst = std::max(worst, relative_error(analytic.grad.at(k), numeric));
    }
    CAPTURE(trial);
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("train_step bookkeeping") {
  RandomSource rng(31);
  const auto g = fixtures::erdos_renyi(10, 0.4, rng);
  const auto x = random_attributes(10, 3, rng);
  const auto pairs = random_pairs(10, 20, rng);

  auto p = init_params(3, 4, 3, 8);
  const auto before = p;
  RandomSource r0(1);
  (void)train_step(p, g, x, pairs, 0.0, 5, r0);
  CHECK(p.w1 == before.w1);
  CHECK(p.w2 == before.w2);

  // Small steps decrease the loss on the same sampled plan.
  const auto nodes = batch_nodes(pairs);
  RandomSource plan_rng(4);
  const auto plan = plan_sampled(g, nodes, 5, plan_rng);
  const auto grad = batch_gradient(p, x, pairs, plan);
  auto q = p;
  q.axpy(-1e-3, grad.grad);
  CHECK(batch_loss(q, x, pairs, plan) <= grad.loss);

  auto bad = init_params(3, 4, 3, 8);
  bad.w2(0, 0) = std::numeric_limits<double>::quiet_NaN();
  RandomSource r1(1);
  CHECK_THROWS_AS(train_step(bad, g, x, pairs, 0.1, 5, r1), TrainingError);
}

TEST_CASE("structure contexts separate two cliques") {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < 6; ++u) {
    for (NodeId v = u + 1; v < 6; ++v) {
      edges.emplace_back(u, v);
      edges.emplace_back(u + 6, v + 6);
    }
  }
  edges.emplace_back(0, 6);
  const auto g = Graph::from_edges(edges, 12);
  RandomSource rng(8);
  const auto x = random_attributes(12, 8, rng);
  auto p = init_params(8, 16, 8, 3);
  const NoiseDistribution noise(g);
  const LabelContextIndex none;
  for (int step = 0; step < 200; ++step) {
    const auto batch = sample_batch(g, none, noise, SamplerOptions{1.0, 5, 32, 8}, rng);
    (void)train_step(p, g, x, batch.pairs, 0.1, 10, rng);
  }
  const auto e = embed_all(p, g, x);
  double intra = 0.0, inter = 0.0;
  int ni = 0, nx = 0;
  for (NodeId u = 0; u < 12; ++u) {
    for (NodeId v = u + 1; v < 12; ++v) {
      const double dot = e.row(u).dot(e.row(v));
      if ((u < 6) == (v < 6)) {
        intra += dot;
        ++ni;
      } else {
        inter += dot;
        ++nx;
      }
    }
  }
  CHECK(intra / ni > inter / nx);
}

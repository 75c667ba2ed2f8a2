#include <doctest.h>

#include <cmath>
#include <vector>

#include "cycprop/errors.hpp"
#include "cycprop/noise.hpp"

using namespace cycprop;

namespace {

// Star with `leaves` leaves plus one extra leaf attached to a second hub, so
// that degrees are [1, 16] on nodes 0 and 1 when leaves = 15.
Graph degrees_1_and_16() {
  std::vector<Edge> edges = {{0, 1}};
  for (NodeId v = 2; v < 17; ++v) edges.emplace_back(1, v);
  return Graph::from_edges(edges, 17);
}

}  // namespace

TEST_CASE("probabilities follow degree^(3/4)") {
  const auto g = degrees_1_and_16();
  REQUIRE(g.degree(0) == 1);
  REQUIRE(g.degree(1) == 16);
  const NoiseDistribution dist(g);
  double total = 0.0;
  for (NodeId v = 0; v < g.node_count(); ++v) total += std::pow(static_cast<double>(g.degree(v)), 0.75);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    CHECK(dist.probability(v) ==
          doctest::Approx(std::pow(static_cast<double>(g.degree(v)), 0.75) / total).epsilon(1e-12));
  }
  // 16^{3/4} = 8, so hub / leaf = 8 / 1.
  CHECK(dist.probability(1) / dist.probability(0) == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("two-node degree example [1, 16]") {
  // Weights [1, 16] on two entries: 1^{3/4} = 1, 16^{3/4} = 8.
  const std::vector<double> w = {1.0, 8.0};
  const AliasTable table(w);
  CHECK(table.probability(0) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(table.probability(1) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));

  RandomSource rng(2024);
  int ones = 0;
  const int draws = 90000;
  for (int i = 0; i < draws; ++i) ones += table.sample(rng) == 1;
  CHECK(std::abs(static_cast<double>(ones) / draws - 8.0 / 9.0) <= 0.01);
}

TEST_CASE("regular graph gives a uniform distribution") {
  const std::vector<Edge> cycle = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  const NoiseDistribution dist(Graph::from_edges(cycle, 4));
  for (NodeId v = 0; v < 4; ++v) CHECK(dist.probability(v) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("isolated nodes are never drawn") {
  // Degrees [0, 5]: node 0 isolated, node 1 a hub.
  std::vector<Edge> edges;
  for (NodeId v = 2; v < 7; ++v) edges.emplace_back(1, v);
  const auto g = Graph::from_edges(edges, 7);
  const NoiseDistribution dist(g);
  CHECK(dist.probability(0) == 0.0);
  RandomSource rng(1);
  for (int i = 0; i < 10000; ++i) CHECK(dist.sample(rng) != 0);

  const std::vector<double> w = {0.0, 5.0};
  const AliasTable single(w);
  for (int i = 0; i < 1000; ++i) CHECK(single.sample(rng) == 1);
}

TEST_CASE("graph without edges is rejected") {
  CHECK_THROWS_AS(NoiseDistribution(Graph::from_edges({}, 3)), InputError);
}

TEST_CASE("sampling is reproducible and converges to the target") {
  std::vector<Edge> edges;
  RandomSource build(7);
  for (int k = 0; k < 200; ++k) {
    edges.emplace_back(static_cast<NodeId>(build.below(30)), static_cast<NodeId>(build.below(30)));
  }
  const auto g = Graph::from_edges(edges, 30);
  const NoiseDistribution dist(g);
  RandomSource a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(dist.sample(a) == dist.sample(b));

  const int draws = 100000;
  std::vector<int> counts(30, 0);
  RandomSource rng(99);
  for (int i = 0; i < draws; ++i) ++counts[dist.sample(rng)];
  for (NodeId v = 0; v < 30; ++v) {
    CHECK(std::abs(static_cast<double>(counts[v]) / draws - dist.probability(v)) < 0.006);
  }
}

TEST_CASE("alias table rejects invalid weights") {
  CHECK_THROWS_AS(AliasTable(std::vector<double>{0.0, 0.0}), InputError);
  CHECK_THROWS_AS(AliasTable(std::vector<double>{1.0, -1.0}), InputError);
}

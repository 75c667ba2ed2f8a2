#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "cycprop/errors.hpp"
#include "cycprop/graph.hpp"
#include "fixtures.hpp"

using namespace cycprop;

namespace {

void check_invariants(const Graph& g) {
  std::size_t degree_sum = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto nb = g.neighbors(u);
    degree_sum += nb.size();
    CHECK(std::is_sorted(nb.begin(), nb.end()));
    CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
    for (auto v : nb) {
      CHECK(v != u);
      CHECK(g.has_edge(v, u));
    }
  }
  CHECK(degree_sum == 2 * g.edge_count());
}

}  // namespace

TEST_CASE("duplicates, reversed copies and self-loops collapse") {
  const std::vector<Edge> edges = {{0, 1}, {1, 0}, {2, 2}};
  const auto g = Graph::from_edges(edges, 3);
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 1);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 1);
  CHECK(g.degree(2) == 0);
  CHECK(g.has_edge(0, 1));
  CHECK_FALSE(g.has_edge(2, 2));
}

TEST_CASE("empty edge list gives isolated nodes") {
  const auto g = Graph::from_edges({}, 4);
  CHECK(g.node_count() == 4);
  CHECK(g.edge_count() == 0);
  for (NodeId v = 0; v < 4; ++v) CHECK(g.degree(v) == 0);
}

TEST_CASE("out-of-range endpoint names the edge") {
  const std::vector<Edge> edges = {{0, 1}, {1, 7}};
  try {
    (void)Graph::from_edges(edges, 3);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("(1, 7)") != std::string::npos);
  }
}

TEST_CASE("random graphs are symmetric simple graphs and rebuild identically") {
  RandomSource rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const NodeId n = 1 + static_cast<NodeId>(rng.below(40));
    std::vector<Edge> edges;
    const auto m = rng.below(3 * n);
    for (std::uint64_t k = 0; k < m; ++k) {
      edges.emplace_back(static_cast<NodeId>(rng.below(n)), static_cast<NodeId>(rng.below(n)));
    }
    const auto g = Graph::from_edges(edges, n);
    check_invariants(g);

    std::set<std::pair<NodeId, NodeId>> expected;
    for (auto [u, v] : edges) {
      if (u != v) expected.emplace(std::min(u, v), std::max(u, v));
    }
    const auto canonical = g.edge_list();
    CHECK(canonical.size() == expected.size());
    CHECK(std::equal(canonical.begin(), canonical.end(), expected.begin()));
    CHECK(Graph::from_edges(canonical, n) == g);
  }
}

TEST_CASE("slot locates stored neighbors") {
  const std::vector<Edge> edges = {{0, 2}, {0, 1}, {2, 3}};
  const auto g = Graph::from_edges(edges, 4);
  const auto idx = g.indices();
  for (NodeId u = 0; u < 4; ++u) {
    for (auto v : g.neighbors(u)) CHECK(idx[g.slot(u, v)] == v);
  }
  CHECK(g.slot(0, 3) == Graph::npos);
  CHECK(g.slot(1, 1) == Graph::npos);
}

TEST_CASE("neighbor sampling") {
  const std::vector<Edge> edges = {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {5, 6}};
  const auto g = Graph::from_edges(edges, 8);
  RandomSource rng(3);
  std::vector<NodeId> out;

  SUBCASE("without replacement when the degree suffices") {
    sample_neighbors(g, 0, 3, rng, out);
    CHECK(out.size() == 3);
    std::set<NodeId> distinct(out.begin(), out.end());
    CHECK(distinct.size() == 3);
    for (auto v : out) CHECK(g.has_edge(0, v));
  }
  SUBCASE("with replacement below the sample size") {
    sample_neighbors(g, 5, 10, rng, out);
    CHECK(out.size() == 10);
    for (auto v : out) CHECK(v == 6);
  }
  SUBCASE("isolated node") {
    sample_neighbors(g, 7, 10, rng, out);
    CHECK(out.empty());
  }
}

TEST_CASE("random source is reproducible and within range") {
  RandomSource a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
  RandomSource r(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7) < 7);
  }
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  RandomSource r1(9), r2(9);
  shuffle(v, r1);
  shuffle(w, r2);
  CHECK(v == w);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}

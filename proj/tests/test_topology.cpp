#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "nmr/rand.hpp"
#include "nmr/topology.hpp"
#include "test_util.hpp"

using namespace nmr;

TEST_CASE("closed neighborhood on paths and cliques") {
  const Graph path3 = Graph::path(3);
  CHECK(path3.closed_neighborhood(1) == std::vector<int>{0, 1, 2});
  CHECK(path3.closed_neighborhood(0) == std::vector<int>{0, 1});
  const Graph k4 = Graph::complete(4);
  CHECK(k4.closed_neighborhood(3) == std::vector<int>{0, 1, 2, 3});
  CHECK(path3.closed_size(1) == 3);
  CHECK_THROWS_AS(path3.closed_neighborhood(3), InputError);
  CHECK_THROWS_AS(path3.neighbors(-1), InputError);
}

TEST_CASE("max degree") {
  CHECK(Graph::star(5).max_degree() == 5);
  CHECK(Graph::cycle(6).max_degree() == 2);
  CHECK(Graph::from_edges(1, {}).max_degree() == 0);
}

TEST_CASE("diameter") {
  CHECK(Graph::path(4).diameter() == 3);
  CHECK(Graph::complete(5).diameter() == 1);
  CHECK(Graph::cycle(4).diameter() == 2);
  CHECK(Graph::from_edges(1, {}).diameter() == 0);
  const Graph split = Graph::from_edges(4, {{0, 1}, {2, 3}}, false);
  CHECK_THROWS_AS(split.diameter(), InputError);
  CHECK(split.max_component_diameter() == 1);
}

TEST_CASE("diameter agrees with the Floyd-Warshall oracle") {
  for (int k = 1; k <= 5; ++k)
    for (const auto& g : testing::all_connected_graphs(k))
      CHECK(g.diameter() == *testing::floyd_warshall_diameter(g));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int k = 2 + static_cast<int>(seed % 7);
    const Graph g = Graph::random_connected(k, seed);
    CHECK(g.diameter() == *testing::floyd_warshall_diameter(g));
  }
}

TEST_CASE("geometric graphs") {
  const Graph g = Graph::geometric({{0, 0}, {1, 0}, {3, 0}}, 1.5);
  CHECK(g.edge_list() == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(Graph::geometric({{0, 0}, {0, 0.5}}, 1.0).has_edge(0, 1));
  // Distance ties count as visible.
  CHECK(Graph::geometric({{0, 0}, {2, 0}}, 2.0).has_edge(0, 1));

  Rng rng(7);
  std::vector<Point2D> points;
  for (int i = 0; i < 10; ++i) points.push_back({rng.unit(), rng.unit()});
  const Graph wide = Graph::geometric(points, 100.0);
  CHECK(wide.edge_list().size() == 45);

  CHECK_THROWS_AS(Graph::geometric({{0, 0}}, -1.0), InputError);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Graph::geometric({{inf, 0}}, 1.0), InputError);
}

TEST_CASE("every node is in its own closed neighborhood") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Graph g = Graph::random_connected(2 + static_cast<int>(seed % 8), seed);
    for (int i = 0; i < g.node_count(); ++i) {
      const auto nbhd = g.closed_neighborhood(i);
      CHECK(std::find(nbhd.begin(), nbhd.end(), i) != nbhd.end());
      CHECK(static_cast<int>(nbhd.size()) == g.closed_size(i));
    }
  }
}

TEST_CASE("geometric adjacency is symmetric") {
  Rng rng(13);
  for (int round = 0; round < 30; ++round) {
    std::vector<Point2D> points;
    const int k = 2 + static_cast<int>(rng.below(8));
    for (int i = 0; i < k; ++i)
      points.push_back({rng.unit() * 3.0, rng.unit() * 3.0});
    const Graph g = Graph::geometric(points, 1.0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) CHECK(g.has_edge(i, j) == g.has_edge(j, i));
  }
}

TEST_CASE("construction rejections") {
  CHECK_THROWS_AS(Graph::from_edges(2, {{0, 0}}), InputError);
  CHECK_THROWS_AS(Graph::from_edges(2, {{0, 1}, {1, 0}}), InputError);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1}}), InputError);  // disconnected
  CHECK_THROWS_AS(Graph::from_edges(2, {{0, 5}}), InputError);
  CHECK_THROWS_AS(Graph::from_edges(0, {}), InputError);
  CHECK_NOTHROW(Graph::from_edges(3, {{0, 1}}, false));
}

TEST_CASE("random connected graphs are connected and deterministic") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int k = 1 + static_cast<int>(seed % 12);
    const Graph a = Graph::random_connected(k, seed);
    const Graph b = Graph::random_connected(k, seed);
    CHECK(a.is_connected());
    CHECK(a == b);
  }
}

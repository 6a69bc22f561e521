#include <doctest.h>

#include "helpers.hpp"
#include "vrjp/graph.hpp"

using namespace vrjp;

TEST_CASE("edge validation") {
  WeightedGraph g(3);
  g.add_edge(0, 1, 1.5);
  CHECK_THROWS_AS(g.add_edge(1, 1, 1.0), GraphError);
  CHECK_THROWS_AS(g.add_edge(1, 0, 1.0), GraphError);
  CHECK_THROWS_AS(g.add_edge(0, 2, 0.0), GraphError);
  CHECK_THROWS_AS(g.add_edge(0, 3, 1.0), GraphError);
  CHECK(g.weight(1, 0) == 1.5);
  CHECK(g.weight(0, 2) == 0.0);
  g.set_self_weight(2, 0.25);
  CHECK(g.weight(2, 2) == 0.25);
  CHECK(g.has_self_weights());
  CHECK(g.edge_count() == 1);
  CHECK_FALSE(g.connected());
}

TEST_CASE("dense round trip and symmetry check") {
  auto g = testing::cycle(4, 2.0);
  g.set_self_weight(1, 0.5);
  const auto d = g.dense();
  CHECK(d(0, 3) == 2.0);
  CHECK(d(1, 1) == 0.5);
  const auto h = WeightedGraph::from_dense(d);
  CHECK(testing::max_abs(h.dense() - d) == 0.0);
  Eigen::MatrixXd bad = d;
  bad(0, 1) = 3.0;
  CHECK_THROWS_AS(WeightedGraph::from_dense(bad), GraphError);
}

TEST_CASE("grid box") {
  const auto g = build_grid(3, 4, 1.0);
  CHECK(g.size() == 64);
  CHECK(g.edge_count() == 144);
  double ext = 0.0;
  for (Vertex v = 0; v < g.size(); ++v) ext += g.external(v);
  CHECK(ext == doctest::Approx(6.0 * 64 - 2.0 * 144));
  // Corner has three outside neighbours, the centre none.
  CHECK(g.external(0) == 3.0);
  CHECK(g.external(grid_index({1, 2, 1}, 4)) == 0.0);
  const auto c = grid_coords(grid_index({1, 2, 3}, 4), 3, 4);
  CHECK(c == std::vector<int>{1, 2, 3});
  CHECK(grid_index({0, 0, 1}, 4) == 1);  // last coordinate fastest
}

TEST_CASE("hop distance and balls") {
  const auto g = build_grid(2, 5, 1.0);
  const Vertex c = grid_index({2, 2}, 5);
  CHECK(ball(g, c, 0).size() == 1);
  CHECK(ball(g, c, 1).size() == 5);
  CHECK(ball(g, c, 2).size() == 13);
  CHECK(ball(g, c, 4).size() == 25);
  CHECK(g.hop_distance(0)[24] == 8);
}

TEST_CASE("regular tree") {
  const auto t = build_regular_tree(3, 3, 2.0);
  CHECK(t.graph.size() == 22);
  CHECK(t.max_depth() == 3);
  CHECK(t.generation(1).size() == 3);
  CHECK(t.generation(3).size() == 12);
  CHECK(t.truncation_size(2) == 10);
  for (Vertex v : t.generation(3)) CHECK(t.graph.external(v) == 4.0);
  CHECK(t.graph.external(0) == 0.0);
  const Vertex leaf = t.generation(3).back();
  const auto r = t.ray(leaf);
  REQUIRE(r.size() == 4);
  CHECK(r.front() == 0);
  CHECK(r.back() == leaf);
  CHECK(t.ancestor(leaf, 1) == r[1]);
  CHECK(t.in_subtree(leaf, r[2]));
  CHECK_FALSE(t.in_subtree(leaf, t.generation(1).front()));
  CHECK(tree_meet(t, t.generation(3).front(), t.generation(3).back()) == 0);
  CHECK(tree_meet(t, leaf, r[2]) == r[2]);
}

TEST_CASE("tree from parents validates numbering") {
  WeightedGraph g(3);
  g.add_edge(0, 2, 1.0);
  g.add_edge(2, 1, 1.0);
  CHECK_THROWS_AS(tree_from_parents(g, 0, {kNoVertex, 2, 0}), GraphError);
  WeightedGraph h(3);
  h.add_edge(0, 1, 1.0);
  h.add_edge(0, 2, 1.0);
  const auto t = tree_from_parents(h, 0, {kNoVertex, 0, 0});
  CHECK(t.generation(1).size() == 2);
}

TEST_CASE("wired restriction") {
  const auto g = build_grid(2, 4, 1.5);
  const auto vn = ball(g, grid_index({1, 1}, 4), 1);
  const auto bg = restrict_wired(g, vn);
  REQUIRE(bg.interior_size() == 5);
  CHECK(bg.boundary_size() == 1);
  // Each vertex of the cross has total conductance 4 W; the interior carries the rest.
  for (Vertex a = 0; a < 5; ++a)
    CHECK(bg.eta(static_cast<Eigen::Index>(a)) + bg.interior.degree_weight(a) == doctest::Approx(6.0));
  const auto full = bg.full();
  CHECK(full.size() == 6);
  CHECK(full.weight(0, 5) == bg.eta(0));
  CHECK_THROWS_AS(restrict_wired(g, {0, 15}), GraphError);
}

TEST_CASE("B_m restriction of a tree") {
  const auto t = build_regular_tree(3, 4, 1.0);
  const auto bg = restrict_tree_bm(t, 1, 3);
  CHECK(bg.boundary_size() == 3);
  CHECK(bg.interior_size() == t.truncation_size(3));
  const Eigen::VectorXd rows = bg.boundary_weights.rowwise().sum();
  CHECK(testing::max_abs(rows - bg.eta) == 0.0);
  // Every depth-3 vertex feeds exactly the cell of its generation-1 ancestor.
  for (Vertex i : t.generation(3)) {
    const auto c = static_cast<Eigen::Index>(t.ancestor(i, 1) - t.generation(1).front());
    CHECK(bg.boundary_weights(static_cast<Eigen::Index>(i), c) == 2.0);
  }
  CHECK_THROWS_AS(restrict_tree_bm(t, 3, 2), GraphError);
}

#include <doctest.h>

#include "helpers.hpp"
#include "vrjp/beta_field.hpp"
#include "vrjp/green.hpp"

using namespace vrjp;

TEST_CASE("operator and inverse") {
  auto g = testing::path(2);
  g.set_self_weight(0, 0.5);
  const HOperator h(g, Eigen::Vector2d(1.0, 1.0));
  Eigen::Matrix2d ref;
  ref << 1.5, -1.0, -1.0, 2.0;
  CHECK(testing::max_abs(h.dense() - ref) == 0.0);
  CHECK(testing::max_abs(Eigen::MatrixXd(h.sparse()) - ref) == 0.0);
  CHECK(testing::max_abs(h.apply(Eigen::Vector2d(1.0, 2.0)) - ref * Eigen::Vector2d(1.0, 2.0)) < 1e-15);
  const auto G = green(h);
  CHECK(testing::max_abs(G.values * ref - Eigen::Matrix2d::Identity()) < 1e-14);
  CHECK(f_ratio(G, 1, 1) == 1.0);
  CHECK(f_ratio(G, 0, 1) == doctest::Approx(G(0, 1) / G(1, 1)));
}

TEST_CASE("non positive definite input reports the pivot") {
  const auto g = testing::path(3);
  Eigen::Vector3d beta(1.0, 0.2, 1.0);  // second pivot 0.4 - 1/2 < 0
  try {
    spd_inverse(HOperator(g, beta).dense());
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.pivot() == 1);
    CHECK(e.value() <= 0.0);
  }
}

TEST_CASE("walk expansions converge to the Green function") {
  const NuParams p{testing::cycle(4), Eigen::VectorXd::Ones(4)};
  Rng rng(21);
  const Eigen::VectorXd beta = sample_nu(p, rng).beta + Eigen::VectorXd::Constant(4, 0.5);
  const Eigen::MatrixXd G = spd_inverse(HOperator(p.graph, beta).dense());
  PathSumConfig dfs, tr;
  dfs.max_length = 10;
  dfs.prune_below = 0.0;
  tr.method = PathSumConfig::Method::Transfer;
  tr.max_length = 10;
  // Both methods sum the same walks.
  for (Vertex i = 0; i < 4; ++i)
    for (Vertex j = 0; j < 4; ++j) {
      CHECK(path_sum_green(p.graph, beta, i, j, dfs) ==
            doctest::Approx(path_sum_green(p.graph, beta, i, j, tr)).epsilon(1e-12));
      CHECK(path_sum_F(p.graph, beta, i, j, dfs) ==
            doctest::Approx(path_sum_F(p.graph, beta, i, j, tr)).epsilon(1e-12));
    }
  tr.max_length = 4000;
  for (Vertex i = 0; i < 4; ++i)
    for (Vertex j = 0; j < 4; ++j) {
      const double ps = path_sum_green(p.graph, beta, i, j, tr);
      CHECK(ps <= G(i, j) * (1 + 1e-12));
      CHECK(ps == doctest::Approx(G(i, j)).epsilon(1e-9));
      CHECK(path_sum_F(p.graph, beta, i, j, tr) == doctest::Approx(G(i, j) / G(j, j)).epsilon(1e-9));
    }
  dfs.max_length = 40;
  dfs.node_budget = 1000;
  CHECK_THROWS_AS(path_sum_green(p.graph, beta, 0, 1, dfs), PathBudgetExceeded);
}

TEST_CASE("self-weights enter walks as loops") {
  WeightedGraph g(1);
  g.set_self_weight(0, 1.0);
  PathSumConfig cfg;
  cfg.method = PathSumConfig::Method::Transfer;
  cfg.max_length = 200;
  // 1/(2b - w) = sum_k w^k / (2b)^{k+1}
  CHECK(path_sum_green(g, Eigen::VectorXd::Constant(1, 1.0), 0, 0, cfg) == doctest::Approx(1.0));
}

TEST_CASE("Schur complement, restricted inverse and harmonicity") {
  const auto grid = build_grid(2, 4, 1.0);
  NuParams p = NuParams::zero_eta(grid);
  for (Vertex v = 0; v < grid.size(); ++v) p.eta(static_cast<Eigen::Index>(v)) = grid.external(v);
  Rng rng(2);
  const Eigen::VectorXd beta = sample_nu(p, rng).beta;
  const Eigen::MatrixXd h = HOperator(grid, beta).dense();
  const Eigen::MatrixXd G = spd_inverse(h);
  const std::vector<Vertex> U{5, 6, 9};
  const auto C = complement(grid.size(), U);
  CHECK(C.size() == 13);
  const Eigen::MatrixXd s = spd_inverse(schur(h, U));
  for (std::size_t a = 0; a < C.size(); ++a)
    for (std::size_t b = 0; b < C.size(); ++b)
      CHECK(s(a, b) == doctest::Approx(G(C[a], C[b])).epsilon(1e-10));
  // Column of G is harmonic off its pole.
  const Eigen::VectorXd col = G.col(5);
  CHECK(harmonic_residual(h, col, complement(grid.size(), {5})) < 1e-12);
  CHECK(harmonic_residual(HOperator(grid, beta), col, complement(grid.size(), {5})) < 1e-12);

  // psi solves the boundary problem and Ghat grows with the domain.
  const auto small = ball(grid, 5, 1), big = ball(grid, 5, 2);
  const Eigen::VectorXd psi = psi_restricted(grid, beta, small);
  CHECK(psi_residual(grid, beta, small, outward_weights(grid, small), psi) < 1e-12);
  CHECK((psi.array() > 0).all());
  const auto g1 = hat_green_restricted(grid, beta, small), g2 = hat_green_restricted(grid, beta, big);
  CHECK(g1.kind == GreenKind::Restricted);
  CHECK(g1.size() == 16);
  CHECK((g2.values - g1.values).minCoeff() > -1e-14);
  CHECK(g1(0, 0) == 0.0);  // vertex 0 is outside the ball
}

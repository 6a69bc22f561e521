#include <doctest.h>

#include "helpers.hpp"
#include "vrjp/beta_field.hpp"
#include "vrjp/experiments.hpp"
#include "vrjp/green.hpp"
#include "vrjp/representation.hpp"

using namespace vrjp;

TEST_CASE("standard representation and its reconstruction") {
  const auto host = build_grid(2, 3, 1.5);
  const BoundaryGraph bg = restrict_wired(host, {0, 1, 2, 3, 4, 5, 6, 7, 8});
  Rng rng(31);
  const Eigen::VectorXd beta = sample_nu(NuParams::zero_eta(bg.full()), rng).beta;
  const Representation rep = standard_rep(bg, beta, 4);
  CHECK(rep.kind == RepKind::WiredStandard);
  CHECK(to_string(rep.kind) == "wired");
  CHECK(rep.gamma > 0.0);
  CHECK(cycle_consistency(rep.graph, rep.rates) < 1e-12);
  std::vector<Vertex> interior{0, 1, 2, 3, 4, 5, 6, 7, 8};
  const auto env = reconstruct_env(rep.rates, rep.gamma, 4, rep.graph, interior);
  CHECK(testing::max_abs(env.beta - beta) < 1e-10 * testing::max_abs(beta));
  CHECK(testing::max_abs(env.green_row - rep.green_row) < 1e-10 * testing::max_abs(rep.green_row));
  CHECK(env.max_residual < 1e-8);
  // h on the interior equals psi psi(i0) / (2 gamma_delta).
  const Eigen::VectorXd psi = psi_restricted(bg.full(), beta, interior, bg.eta);
  for (Vertex v = 0; v < 9; ++v)
    CHECK(env.h(v) == doctest::Approx(psi(v) * psi(4) / (2.0 * rep.gamma_boundary)).epsilon(1e-9));
  // Whole-graph interior: h vanishes.
  const auto whole = reconstruct_env(rep.rates, rep.gamma, 4, rep.graph);
  CHECK(testing::max_abs(whole.h) < 1e-10 * testing::max_abs(whole.green_row));
}

TEST_CASE("inconsistent rate fields are rejected") {
  const auto g = testing::cycle(3);
  RateField r(3);
  for (const auto& e : g.edges()) {
    r.set(e.i, e.j, 0.5);
    r.set(e.j, e.i, 0.5);
  }
  CHECK(cycle_consistency(g, r) == doctest::Approx(0.0));
  r.set(0, 1, 0.7);
  CHECK(cycle_consistency(g, r) > 0.1);
  CHECK_THROWS_AS(reconstruct_env(r, 1.0, 0, g), std::domain_error);
}

TEST_CASE("free representation on a tree") {
  const auto t = build_regular_tree(3, 3, 2.0);
  Rng rng(2);
  const auto rep = free_rep(t, rng);
  CHECK(rep.kind == RepKind::TreeFree);
  CHECK(cycle_consistency(t.graph, rep.rates) < 1e-14);
  const Vertex v = t.generation(2).front();
  CHECK(rep.rates.rate(t.parent[v], v) == doctest::Approx(rep.A(v)));
  const auto ray = t.ray(t.generation(3).front());
  const auto s = s_n_statistic(rep.rates, ray, 2.0);
  REQUIRE(s.size() == 3);
  CHECK(s[2] == doctest::Approx(rep.A(ray[1]) * rep.A(ray[2]) * rep.A(ray[3])));
}

TEST_CASE("B_m representation") {
  const auto t = build_regular_tree(3, 4, 2.0);
  Rng rng(12);
  const Eigen::VectorXd beta = sample_nu(tree_wired_params(t, 4), rng).beta;
  const TreeBoundary tb(t, beta, 1, 4);
  const Eigen::VectorXd full = extend_to_boundary(tb.boundary_graph(), beta, rng).beta;
  const Eigen::VectorXd rho = rho_from_boundary_beta(tb, full.tail(3));
  const auto rep = bm_rep(tb, rho, 0);
  CHECK(rep.graph.size() == tb.interior_size() + 3);
  CHECK(testing::max_abs(rep.beta - full) < 1e-12);
  CHECK(cycle_consistency(rep.graph, rep.rates) < 1e-12);
  const auto env = reconstruct_env(rep.rates, rep.gamma, 0, rep.graph);
  CHECK(testing::max_abs(env.beta - full) < 1e-10 * testing::max_abs(full));
}

#include <doctest.h>

#include "helpers.hpp"
#include "vrjp/beta_field.hpp"
#include "vrjp/experiments.hpp"
#include "vrjp/green.hpp"
#include "vrjp/tree_boundary.hpp"

using namespace vrjp;

namespace {
struct Fixture {
  RootedTree t = build_regular_tree(3, 4, 2.0);
  Rng rng{99};
  Eigen::VectorXd beta;
  Fixture() { beta = sample_nu(tree_wired_params(t, 4), rng).beta; }
};
}  // namespace

TEST_CASE("chi decomposition of psi") {
  Fixture f;
  for (int m = 0; m <= 4; ++m) {
    const TreeBoundary tb(f.t, f.beta, m, 4);
    const Eigen::VectorXd rows = tb.chi().rowwise().sum();
    CHECK(testing::max_abs(rows - tb.psi()) < 1e-12 * testing::max_abs(tb.psi()));
    CHECK(testing::max_abs(chi_solve(f.t, f.beta, m, 4) - tb.chi()) == 0.0);
    const auto cc = chi_closed(tb);
    CHECK(testing::max_abs(cc.chi - tb.chi()) < 1e-10 * testing::max_abs(tb.chi()));
    CHECK((tb.chi().row(0).array() > 0).all());
    // chi_k at any generation also sums to psi.
    for (int k = 0; k <= 4; ++k)
      CHECK(testing::max_abs(Eigen::VectorXd(tb.chi_depth(k).rowwise().sum()) - tb.psi()) < 1e-12);
  }
}

TEST_CASE("check matrix and boundary Green assembly") {
  Fixture f;
  const TreeBoundary tb(f.t, f.beta, 2, 4);
  const Eigen::MatrixXd C = check_matrix(tb);
  CHECK(C.rows() == 6);
  CHECK(testing::max_abs(C - C.transpose()) == 0.0);
  CHECK(C.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(C.minCoeff() >= 0.0);
  const Eigen::VectorXd full = extend_to_boundary(tb.boundary_graph(), f.beta, f.rng).beta;
  const Eigen::VectorXd bb = full.tail(6);
  const Eigen::VectorXd rho = rho_from_boundary_beta(tb, bb);
  CHECK(testing::max_abs(boundary_beta_from_rho(tb, rho) - bb) < 1e-14);
  const Eigen::MatrixXd dense = spd_inverse(HOperator(tb.boundary_graph().full(), full).dense());
  const Eigen::MatrixXd gm = g_m_n_matrix(tb, rho);
  CHECK(testing::max_abs(gm - dense) < 1e-10 * testing::max_abs(dense));
  CHECK(g_m_n(f.t, f.beta, rho, 2, 4, 3, 7) == doctest::Approx(dense(3, 7)).epsilon(1e-10));
}

TEST_CASE("harmonic measure table agrees with chi") {
  Fixture f;
  const TreeBoundary tb(f.t, f.beta, 1, 4);
  const auto tab = harmonic_measure_table(f.t, [&](Vertex i, Vertex j) { return tb.f(i, j); }, 1, 4);
  const double psi0 = tb.psi()(0);
  for (int k = 0; k <= 4; ++k) {
    const Eigen::MatrixXd chi = tb.chi_depth(k);
    const Vertex first = f.t.generation(k).front();
    double total = 0.0;
    for (Vertex x : f.t.generation(k)) {
      CHECK(tab(0, x) == doctest::Approx(chi(0, static_cast<Eigen::Index>(x - first)) / psi0).epsilon(1e-10));
      total += tab(0, x);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("psi-walk exit law matches chi by simulation") {
  Fixture f;
  const TreeBoundary tb(f.t, f.beta, 1, 4);
  const auto& g = tb.boundary_graph().interior;
  const Eigen::VectorXd& psi = tb.psi();
  const int N = 20000;
  std::vector<double> hits(3, 0.0);
  for (int r = 0; r < N; ++r) {
    Vertex i = 0;
    for (;;) {
      // Jump chain of the Doob transform: j with weight W_ij psi_j, exit with weight eta_i.
      double u = uniform01(f.rng) * 2.0 * f.beta(i) * psi(i);
      Vertex next = kNoVertex;
      for (const auto& nb : g.neighbors(i)) {
        u -= nb.w * psi(nb.to);
        if (u < 0.0) {
          next = nb.to;
          break;
        }
      }
      if (next == kNoVertex) break;
      i = next;
    }
    hits[f.t.ancestor(i, 1) - 1] += 1.0;
  }
  for (Vertex x = 1; x <= 3; ++x) {
    const double p = tb.chi()(0, x - 1) / psi(0);
    const double se = std::sqrt(p * (1 - p) / N);
    CHECK(std::abs(hits[x - 1] / N - p) < 4.0 * se);
  }
}

TEST_CASE("exit measure of the B_m representation") {
  Fixture f;
  const TreeBoundary tb(f.t, f.beta, 2, 4);
  const Eigen::VectorXd full = extend_to_boundary(tb.boundary_graph(), f.beta, f.rng).beta;
  const Eigen::VectorXd rho = rho_from_boundary_beta(tb, full.tail(6));
  for (int k = 0; k <= 4; ++k) {
    double total = 0.0;
    for (Vertex x : f.t.generation(k)) total += exit_measure_rep(tb, rho, x);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
  // Below the boundary generation the ratios follow chi.
  const Eigen::MatrixXd c3 = tb.chi_depth(3), c2 = tb.chi_depth(2);
  for (Vertex x : f.t.generation(3)) {
    const Vertex px = f.t.parent[x];
    const double lhs = exit_measure_rep(tb, rho, x) / exit_measure_rep(tb, rho, px);
    const double rhs = c3(0, static_cast<Eigen::Index>(x - f.t.generation(3).front())) /
                       c2(0, static_cast<Eigen::Index>(px - f.t.generation(2).front()));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

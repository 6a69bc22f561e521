#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "helpers.hpp"
#include "vrjp/beta_field.hpp"
#include "vrjp/stats.hpp"

using namespace vrjp;

namespace {

// Integral over beta > w/2 of f(beta) * density, substituting 2 beta - w = u^2
// to remove the inverse square-root singularity at the boundary.
template <class F>
double single_site_integral(const NuParams& p, F f) {
  const double w = p.graph.self_weight(0);
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate([&](double u) {
    const double b = 0.5 * (u * u + w);
    Eigen::VectorXd beta(1);
    beta << b;
    return f(b) * nu_density(p, beta) * u;
  });
}

}  // namespace

TEST_CASE("density reference values") {
  NuParams one = NuParams::zero_eta(WeightedGraph(1));
  CHECK(nu_density(one, Eigen::VectorXd::Ones(1)) == doctest::Approx(std::exp(-1.0) / std::sqrt(M_PI)));
  NuParams two = NuParams::zero_eta(testing::path(2));
  CHECK(nu_density(two, Eigen::VectorXd::Ones(2)) ==
        doctest::Approx(2.0 / M_PI * std::exp(-1.0) / std::sqrt(3.0)));
  Eigen::VectorXd out(2);
  out << 0.4, 0.4;  // 4 beta_0 beta_1 < 1: outside the domain
  CHECK_FALSE(in_domain(two.graph, out));
  CHECK(nu_density(two, out) == 0.0);
}

TEST_CASE("single-site density integrates to one") {
  for (double eta : {0.0, 0.7, 2.0}) {
    for (double w : {0.0, 1.3}) {
      WeightedGraph g(1);
      g.set_self_weight(0, w);
      NuParams p{g, Eigen::VectorXd::Constant(1, eta)};
      // With w > 0, 2 beta - w rounds to zero for u below ~sqrt(eps w), dropping O(1e-8) mass.
      CHECK(single_site_integral(p, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(w > 0 ? 1e-7 : 1e-9));
    }
  }
}

TEST_CASE("two-vertex density integrates to one") {
  // beta_1 = 1/(4 beta_0) + u^2 on the inner integral.
  const NuParams p{testing::path(2), Eigen::Vector2d(0.5, 0.0)};
  boost::math::quadrature::exp_sinh<double> outer, inner;
  const double total = outer.integrate([&](double b0) {
    return inner.integrate([&](double u) {
      Eigen::Vector2d beta(b0, 1.0 / (4.0 * b0) + u * u);
      return 2.0 * u * nu_density(p, beta);
    });
  });
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Laplace transform closed form") {
  const NuParams one = NuParams::zero_eta(WeightedGraph(1));
  CHECK(nu_laplace(one, Eigen::VectorXd::Constant(1, 3.0)) == doctest::Approx(0.5));
  const NuParams tri = NuParams::zero_eta(testing::cycle(3));
  CHECK(nu_laplace(tri, Eigen::VectorXd::Zero(3)) == 1.0);
  // Self-weight and eta handled through the shift identity; compare with quadrature.
  WeightedGraph g(1);
  g.set_self_weight(0, 0.8);
  const NuParams p{g, Eigen::VectorXd::Constant(1, 1.1)};
  for (double lam : {0.3, 1.0, 2.5}) {
    const double q = single_site_integral(p, [&](double b) { return std::exp(-lam * b); });
    CHECK(nu_laplace(p, Eigen::VectorXd::Constant(1, lam)) == doctest::Approx(q).epsilon(1e-9));
  }
}

TEST_CASE("marginal and conditional factorise the density") {
  NuParams p{testing::cycle(4, 1.3), Eigen::Vector4d(0.2, 0.0, 0.5, 0.0)};
  p.graph.add_edge(0, 2, 0.7);
  const Eigen::Vector4d beta(2.4, 2.1, 2.6, 1.9);
  REQUIRE(in_domain(p.graph, beta));
  const std::vector<Vertex> U{2, 0};
  const NuParams marg = marginal_params(p, U);
  const Eigen::Vector2d bu(beta(2), beta(0));
  const auto cond = conditional_params(p, U, bu);
  REQUIRE(cond.vertices == std::vector<Vertex>{1, 3});
  const Eigen::Vector2d br(beta(1), beta(3));
  CHECK(nu_density(p, beta) == doctest::Approx(nu_density(marg, bu) * nu_density(cond.params, br)).epsilon(1e-12));
  // Marginal Laplace transform is the full one with zeros off U.
  const Eigen::Vector2d lu(0.4, 1.7);
  const Eigen::Vector4d lf(1.7, 0.0, 0.4, 0.0);
  CHECK(nu_laplace(marg, lu) == doctest::Approx(nu_laplace(p, lf)).epsilon(1e-12));
}

TEST_CASE("single-site sampler matches the Gamma(1/2) law") {
  Rng rng(7);
  std::vector<double> s;
  for (int k = 0; k < 20000; ++k) s.push_back(sample_single_site({0.0, 0.0}, rng));
  CHECK(ks_test(s, gamma_half_cdf).score > 1e-3);
  // eta > 0: E[beta] from the closed-form Laplace transform derivative.
  const NuParams p{WeightedGraph(1), Eigen::VectorXd::Constant(1, 1.5)};
  std::vector<double> t;
  for (int k = 0; k < 20000; ++k) t.push_back(sample_single_site({0.0, 1.5}, rng));
  // One-sided second-order difference at lambda = 0.
  const double h = 1e-4;
  const auto L = [&](double l) { return nu_laplace(p, Eigen::VectorXd::Constant(1, l)); };
  const double mean = (3.0 * L(0.0) - 4.0 * L(h) + L(2.0 * h)) / (2.0 * h);
  const auto est = mean_and_stderr(t);
  CHECK(std::abs(est.mean - mean) < 4.0 * est.se);
}

TEST_CASE("sampler law does not depend on the elimination order") {
  const NuParams p = NuParams::zero_eta(testing::cycle(4));
  Rng a(11), b(12);
  SampleOptions o1, o2;
  o1.order = {0, 1, 2, 3};
  o2.order = {3, 1, 0, 2};
  std::vector<double> x, y;
  for (int k = 0; k < 5000; ++k) {
    x.push_back(sample_nu(p, a, o1).beta(0));
    y.push_back(sample_nu(p, b, o2).beta(0));
  }
  CHECK(ks_two_sample(x, y).score > 1e-3);
}

TEST_CASE("conditional sampling keeps fixed values and extends into the domain") {
  const NuParams p = NuParams::zero_eta(testing::path(5));
  Rng rng(3);
  const Eigen::Vector2d fb(0.9, 1.2);
  for (int k = 0; k < 50; ++k) {
    const auto s = sample_nu_conditional(p, {1, 2}, fb, rng);
    CHECK(s.beta(1) == 0.9);
    CHECK(s.beta(2) == 1.2);
    CHECK(in_domain(p.graph, s.beta));
  }
  const Eigen::Vector2d bad(0.2, 0.2);
  CHECK_THROWS_AS(sample_nu_conditional(p, {1, 2}, bad, rng), DomainError);
}

TEST_CASE("boundary extension") {
  const auto g = build_grid(2, 3, 1.0);
  const auto bg = restrict_wired(g, {0, 1, 2, 3, 4, 5, 6, 7, 8});
  NuParams p{bg.interior, bg.eta};
  Rng rng(5);
  const Eigen::VectorXd beta = sample_nu(p, rng).beta;
  const auto full = extend_to_boundary(bg, beta, rng).beta;
  CHECK(full.size() == 10);
  CHECK(testing::max_abs(full.head(9) - beta) == 0.0);
  CHECK(in_domain(bg.full(), full));
}

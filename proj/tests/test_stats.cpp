#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "helpers.hpp"
#include "vrjp/experiments.hpp"
#include "vrjp/random.hpp"
#include "vrjp/stats.hpp"

using namespace vrjp;

TEST_CASE("Kolmogorov distribution") {
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("one-sample KS: null and wrong family") {
  Rng rng(1);
  std::vector<double> u, g;
  for (int k = 0; k < 10000; ++k) {
    u.push_back(uniform01(rng));
    g.push_back(sample_gamma_half(rng));
  }
  CHECK(ks_test(u, [](double x) { return std::clamp(x, 0.0, 1.0); }).pass);
  CHECK(ks_test(g, gamma_half_cdf).pass);
  CHECK_FALSE(ks_test(g, [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); }).pass);
  CHECK_THROWS(ks_test({}, gamma_half_cdf));
}

TEST_CASE("Gamma(1/2) cdf by quadrature") {
  boost::math::quadrature::tanh_sinh<double> q;
  for (double x : {0.05, 0.5, 2.0}) {
    // Substitute y = u^2: density y^{-1/2} e^{-y} / sqrt(pi) dy = 2 e^{-u^2} / sqrt(pi) du.
    const double v = q.integrate([](double u) { return 2.0 * std::exp(-u * u) / std::sqrt(M_PI); }, 0.0, std::sqrt(x));
    CHECK(gamma_half_cdf(x) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("inverse Gaussian sampler and cdf") {
  Rng rng(2);
  for (double shape : {0.5, 1.0, 4.0}) {
    std::vector<double> s;
    for (int k = 0; k < 10000; ++k) s.push_back(sample_inverse_gaussian(1.0, shape, rng));
    CHECK(ks_test(s, [&](double x) { return inverse_gaussian_cdf(x, 1.0, shape); }).score > 1e-3);
  }
}

TEST_CASE("chi-square homogeneity") {
  CHECK(chi2_survival(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
  const std::vector<double> a{100, 200, 300, 1}, b{110, 190, 305, 2};
  const auto r = chi2_homogeneity(a, b);
  CHECK(r.pass);
  REQUIRE(!r.notes.empty());
  CHECK(r.notes[0] == "categories=4 merged=1");
  const std::vector<double> c{100, 200, 300}, d{300, 200, 100};
  CHECK_FALSE(chi2_homogeneity(c, d).pass);
}

TEST_CASE("distance covariance test") {
  Rng rng(3);
  Eigen::MatrixXd x(2000, 1), y(2000, 1), z(2000, 1);
  for (int k = 0; k < 2000; ++k) {
    x(k, 0) = standard_normal(rng);
    y(k, 0) = standard_normal(rng);
    z(k, 0) = x(k, 0) * x(k, 0) + 0.1 * standard_normal(rng);
  }
  CHECK(distance_correlation_test(x, y).pass);
  CHECK_FALSE(distance_correlation_test(x, z).pass);
  CHECK(distance_correlation(x, x) == doctest::Approx(1.0));
}

TEST_CASE("summaries") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(quantile({0.0, 1.0, 2.0, 3.0, 4.0}, 0.25) == 1.0);
  const auto m = mean_and_stderr({1.0, 2.0, 3.0});
  CHECK(m.mean == 2.0);
  CHECK(m.se == doctest::Approx(std::sqrt(1.0 / 3.0)));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964));
}

TEST_CASE("Laplace comparison harness") {
  const NuParams p = NuParams::zero_eta(WeightedGraph(1));
  const auto s = sample_many(p, 20000, 17, 1);
  std::vector<Eigen::VectorXd> panel{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 3.0)};
  const auto r = mc_laplace(s, panel, [&](const Eigen::VectorXd& l) { return nu_laplace(p, l); });
  CHECK(r.rows[0].z == 0.0);
  CHECK(r.rows[1].closed == doctest::Approx(0.5));
  CHECK(r.report.pass);
  CHECK(default_lambda_panel(4).size() == 5);
}

TEST_CASE("xGx harness") {
  // eta = 0: both sides are identically zero.
  const auto r0 = xgx_identity_test(testing::cycle(3), Eigen::VectorXd::Zero(3), 200, 1, 1);
  CHECK(r0.statistic == 0.0);
  // Single vertex, eta = 1: <eta, G eta> = 1/(2 beta) with beta ~ Gamma(1/2), an exact identity.
  const auto r1 = xgx_identity_test(WeightedGraph(1), Eigen::VectorXd::Ones(1), 5000, 2, 1);
  CHECK(r1.pass);
}

TEST_CASE("seed derivation and parallel replicates are thread-count independent") {
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, std::uint64_t{0}) != derive_seed(2, std::uint64_t{0}));
  const NuParams p = NuParams::zero_eta(testing::cycle(3));
  const auto a = sample_many(p, 64, 5, 1), b = sample_many(p, 64, 5, 3);
  CHECK(testing::max_abs(a - b) == 0.0);
}

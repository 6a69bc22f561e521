#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "vrjp/experiments.hpp"
#include "vrjp/process.hpp"
#include "vrjp/stats.hpp"

using namespace vrjp;

TEST_CASE("VRJP trajectories respect their budgets") {
  const auto g = testing::cycle(3);
  Rng rng(4);
  const auto t = simulate_vrjp(g, 0, Budget::jump_count(100), rng);
  REQUIRE(t.jumps() == 100);
  CHECK(t.states.size() == 101);
  CHECK(std::is_sorted(t.jump_times.begin(), t.jump_times.end()));
  for (std::size_t k = 0; k < t.jumps(); ++k) CHECK(t.states[k] != t.states[k + 1]);
  CHECK(t.local_time.sum() == doctest::Approx(t.horizon));
  CHECK(t.state_at(0.0) == 0);

  const auto h = simulate_vrjp(g, 1, Budget::time(2.5), rng);
  CHECK(h.truncated);
  CHECK(h.horizon == 2.5);
  CHECK(h.local_time.sum() == doctest::Approx(2.5));

  const auto z = time_change(simulate_vrjp(g, 0, Budget::z_time(3.0), rng));
  CHECK(z.horizon == doctest::Approx(3.0));
  CHECK(z.local_time.sum() == doctest::Approx(3.0));
}

TEST_CASE("time change is D(s) = sum (L^2 - 1) and invertible") {
  const auto g = testing::path(3);
  Rng rng(8);
  const auto y = simulate_vrjp(g, 1, Budget::jump_count(20), rng);
  const TimeChange tc(y);
  const double s = 0.6 * y.horizon;
  // Direct evaluation from local times up to s.
  Eigen::VectorXd l = Eigen::VectorXd::Zero(3);
  double prev = 0.0;
  for (std::size_t k = 0; k <= y.jumps(); ++k) {
    const double end = k < y.jumps() ? y.jump_times[k] : y.horizon;
    l(static_cast<Eigen::Index>(y.states[k])) += std::max(0.0, std::min(end, s) - prev);
    prev = end;
    if (end >= s) break;
  }
  const double d = ((1.0 + l.array()).square() - 1.0).sum();
  CHECK(tc.forward(s) == doctest::Approx(d));
  CHECK(tc.inverse(tc.forward(s)) == doctest::Approx(s));
  const auto z = time_change(y);
  for (std::size_t k = 0; k < y.jumps(); ++k) CHECK(z.jump_times[k] == doctest::Approx(tc.forward(y.jump_times[k])));
}

TEST_CASE("jump process holding times and rate estimation") {
  RateField r(2);
  r.set(0, 1, 2.0);
  r.set(1, 0, 0.5);
  CHECK(r.holding(0) == 2.0);
  Rng rng(9);
  const auto t = simulate_mjp(r, 0, Budget::jump_count(40000), rng);
  const auto est = estimate_rates_from_traj(t, 2);
  CHECK(est.estimated[0]);
  CHECK(std::abs(est.rates.rate(0, 1) - 2.0) < 4.0 * est.std_error.rate(0, 1));
  CHECK(std::abs(est.rates.rate(1, 0) - 0.5) < 4.0 * est.std_error.rate(1, 0));
  CHECK_THROWS(simulate_mjp(r, 0, Budget::z_time(1.0), rng));
}

TEST_CASE("Radon-Nikodym density") {
  const auto g = testing::cycle(3);
  // No jump before T: local time T at the start vertex only.
  Trajectory z;
  z.start = 0;
  z.states = {0};
  z.horizon = 1.0;
  z.local_time = Eigen::Vector3d(1.0, 0.0, 0.0);
  const double expect = -2.0 * (std::sqrt(2.0) - 1.0) + 0.5 * 2.0 * 1.0;
  CHECK(log_rn_density(g, 0, z) == doctest::Approx(expect));
  // Mean one under the reference process.
  RateField base(3);
  for (const auto& e : g.edges()) {
    base.set(e.i, e.j, 0.5);
    base.set(e.j, e.i, 0.5);
  }
  Rng rng(10);
  std::vector<double> w;
  for (int k = 0; k < 40000; ++k) w.push_back(rn_density(g, 0, simulate_mjp(base, 0, Budget::time(1.0), rng)));
  const auto m = mean_and_stderr(w);
  CHECK(std::abs(m.mean - 1.0) < 4.0 * m.se);
}

TEST_CASE("mixture on two vertices: the only possible first jump") {
  const auto res = mixture_equivalence(testing::path(2), 0, 1, 500, 1, 1);
  REQUIRE(res.sequences.size() == 1);
  CHECK(res.sequences[0] == std::vector<Vertex>{1});
  CHECK(res.tv == 0.0);
}

TEST_CASE("planted mixture defect is detected") {
  const auto res = mixture_equivalence(testing::cycle(3), 0, 3, 100000, 5, 1, MixtureDefect::FrozenGamma);
  CHECK_FALSE(res.chi2.pass);
}

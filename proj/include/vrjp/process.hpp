#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vrjp/graph.hpp"
#include "vrjp/random.hpp"

namespace vrjp {

struct Trajectory {
  Vertex start = 0;
  std::vector<double> jump_times;  // strictly increasing
  std::vector<Vertex> states;      // states[0] = start, states[k] after the k-th jump
  double horizon = 0.0;
  bool truncated = false;          // stopped by a horizon budget (mid-sojourn)
  bool absorbed = false;           // reached a vertex with zero holding rate
  Eigen::VectorXd local_time;      // time spent at each vertex up to horizon

  std::size_t jumps() const { return jump_times.size(); }
  Vertex state_at(double t) const;
};

struct Budget {
  enum class Kind { Horizon, Jumps, ZHorizon };
  Kind kind = Kind::Jumps;
  double horizon = 0.0;
  std::size_t jumps = 0;

  static Budget time(double h) { return {Kind::Horizon, h, 0}; }
  static Budget jump_count(std::size_t k) { return {Kind::Jumps, 0.0, k}; }
  // VRJP only: stop when the time-changed clock D reaches h.
  static Budget z_time(double h) { return {Kind::ZHorizon, h, 0}; }
};

// Simulated in its own clock; rates W_ij (1 + local time at j).
Trajectory simulate_vrjp(const WeightedGraph& g, Vertex i0, const Budget& budget, Rng& rng);

// D(s) = sum_i (L_i(s)^2 - 1) for a VRJP trajectory, with its inverse.
class TimeChange {
 public:
  explicit TimeChange(const Trajectory& y);
  double forward(double s) const;
  double inverse(double t) const;

 private:
  std::vector<double> s_knots_, d_knots_, l_at_;  // per sojourn: start s, start D, L of the occupied vertex
  double horizon_;
};

Trajectory time_change(const Trajectory& y);

class RateField {
 public:
  RateField() = default;
  explicit RateField(std::size_t n) : out_(n) {}
  std::size_t size() const { return out_.size(); }
  void set(Vertex i, Vertex j, double r);
  double rate(Vertex i, Vertex j) const;
  double holding(Vertex i) const;
  const std::vector<std::pair<Vertex, double>>& out(Vertex i) const { return out_.at(i); }

 private:
  std::vector<std::vector<std::pair<Vertex, double>>> out_;
};

Trajectory simulate_mjp(const RateField& r, Vertex i0, const Budget& budget, Rng& rng);

// Density of the time-changed VRJP against the jump process with rates W/2,
// on paths observed up to the trajectory's horizon.
double log_rn_density(const WeightedGraph& g, Vertex i0, const Trajectory& z);
double rn_density(const WeightedGraph& g, Vertex i0, const Trajectory& z);

struct RateEstimate {
  RateField rates;
  RateField std_error;               // sqrt(N_ij) / T_i
  std::vector<std::size_t> visits;   // completed sojourns per vertex
  std::vector<char> estimated;       // false when fewer than 2 completed sojourns
};

// r_ij = (fraction of departures from i to j) / (mean sojourn at i).
RateEstimate estimate_rates_from_traj(const Trajectory& t, std::size_t n_vertices);

}  // namespace vrjp

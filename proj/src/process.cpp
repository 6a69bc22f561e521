#include "vrjp/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vrjp {

Vertex Trajectory::state_at(double t) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  return states[static_cast<std::size_t>(it - jump_times.begin())];
}

namespace {

void check_budget(const Budget& b) {
  if (b.kind != Budget::Kind::Jumps && !(b.horizon >= 0.0)) throw std::invalid_argument("negative horizon");
}

template <class T>
std::size_t pick(const std::vector<T>& weights, double total, Rng& rng) {
  double u = uniform01(rng) * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    u -= weights[k];
    if (u < 0.0) return k;
  }
  // Roundoff: return the last positive weight.
  for (std::size_t k = weights.size(); k-- > 0;)
    if (weights[k] > 0.0) return k;
  return 0;
}

}  // namespace

Trajectory simulate_vrjp(const WeightedGraph& g, Vertex i0, const Budget& budget, Rng& rng) {
  check_budget(budget);
  if (i0 >= g.size()) throw GraphError("start vertex out of range");
  Trajectory tr;
  tr.start = i0;
  tr.states.push_back(i0);
  tr.local_time = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  Eigen::VectorXd L = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.size()));
  double s = 0.0, d = 0.0;
  Vertex i = i0;
  std::vector<double> w;
  for (;;) {
    if (budget.kind == Budget::Kind::Jumps && tr.jumps() >= budget.jumps) break;
    const auto& nbs = g.neighbors(i);
    w.resize(nbs.size());
    double total = 0.0;
    for (std::size_t k = 0; k < nbs.size(); ++k) {
      w[k] = nbs[k].w * L(nbs[k].to);
      total += w[k];
    }
    const double li = L(i);
    if (total == 0.0) {
      tr.absorbed = true;
      double stay = 0.0;
      if (budget.kind == Budget::Kind::Horizon) stay = budget.horizon - s;
      if (budget.kind == Budget::Kind::ZHorizon) stay = std::sqrt(li * li + budget.horizon - d) - li;
      tr.local_time(i) += stay;
      s += stay;
      break;
    }
    const double dt = exponential(rng, total);
    if (budget.kind == Budget::Kind::Horizon && s + dt >= budget.horizon) {
      tr.local_time(i) += budget.horizon - s;
      s = budget.horizon;
      tr.truncated = true;
      break;
    }
    const double inc = dt * (2.0 * li + dt);
    if (budget.kind == Budget::Kind::ZHorizon && d + inc >= budget.horizon) {
      const double rest = budget.horizon - d;
      const double tau = rest / (std::sqrt(li * li + rest) + li);
      tr.local_time(i) += tau;
      s += tau;
      tr.truncated = true;
      break;
    }
    tr.local_time(i) += dt;
    L(i) += dt;
    s += dt;
    d += inc;
    i = nbs[pick(w, total, rng)].to;
    tr.jump_times.push_back(s);
    tr.states.push_back(i);
  }
  tr.horizon = s;
  return tr;
}

TimeChange::TimeChange(const Trajectory& y) : horizon_(y.horizon) {
  std::vector<double> lt(static_cast<std::size_t>(y.local_time.size()), 0.0);
  double s = 0.0, d = 0.0;
  for (std::size_t k = 0; k < y.states.size(); ++k) {
    const Vertex v = y.states[k];
    const double end = k < y.jump_times.size() ? y.jump_times[k] : y.horizon;
    const double l = 1.0 + lt[v];
    s_knots_.push_back(s);
    d_knots_.push_back(d);
    l_at_.push_back(l);
    const double dt = end - s;
    d += dt * (2.0 * l + dt);
    lt[v] += dt;
    s = end;
  }
}

double TimeChange::forward(double s) const {
  const auto it = std::upper_bound(s_knots_.begin(), s_knots_.end(), s);
  const std::size_t k = it == s_knots_.begin() ? 0 : static_cast<std::size_t>(it - s_knots_.begin()) - 1;
  const double ds = s - s_knots_[k];
  return d_knots_[k] + ds * (2.0 * l_at_[k] + ds);
}

double TimeChange::inverse(double t) const {
  const auto it = std::upper_bound(d_knots_.begin(), d_knots_.end(), t);
  const std::size_t k = it == d_knots_.begin() ? 0 : static_cast<std::size_t>(it - d_knots_.begin()) - 1;
  const double rest = t - d_knots_[k];
  const double l = l_at_[k];
  return s_knots_[k] + rest / (std::sqrt(l * l + rest) + l);
}

Trajectory time_change(const Trajectory& y) {
  TimeChange tc(y);
  Trajectory z;
  z.start = y.start;
  z.states = y.states;
  z.truncated = y.truncated;
  z.absorbed = y.absorbed;
  z.jump_times.reserve(y.jump_times.size());
  for (double s : y.jump_times) z.jump_times.push_back(tc.forward(s));
  z.horizon = tc.forward(y.horizon);
  z.local_time = ((1.0 + y.local_time.array()).square() - 1.0).matrix();
  return z;
}

void RateField::set(Vertex i, Vertex j, double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("rates must be finite and nonnegative");
  auto& row = out_.at(i);
  for (auto& e : row) {
    if (e.first == j) {
      e.second = r;
      return;
    }
  }
  row.emplace_back(j, r);
}

double RateField::rate(Vertex i, Vertex j) const {
  for (const auto& e : out_.at(i))
    if (e.first == j) return e.second;
  return 0.0;
}

double RateField::holding(Vertex i) const {
  double s = 0.0;
  for (const auto& e : out_.at(i)) s += e.second;
  return s;
}

Trajectory simulate_mjp(const RateField& r, Vertex i0, const Budget& budget, Rng& rng) {
  check_budget(budget);
  if (budget.kind == Budget::Kind::ZHorizon) throw std::invalid_argument("z-time budget applies to the VRJP only");
  if (i0 >= r.size()) throw GraphError("start vertex out of range");
  Trajectory tr;
  tr.start = i0;
  tr.states.push_back(i0);
  tr.local_time = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(r.size()));
  double s = 0.0;
  Vertex i = i0;
  std::vector<double> w;
  for (;;) {
    if (budget.kind == Budget::Kind::Jumps && tr.jumps() >= budget.jumps) break;
    const auto& row = r.out(i);
    w.resize(row.size());
    double total = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      w[k] = row[k].second;
      total += w[k];
    }
    if (total == 0.0) {
      tr.absorbed = true;
      if (budget.kind == Budget::Kind::Horizon) {
        tr.local_time(i) += budget.horizon - s;
        s = budget.horizon;
      }
      break;
    }
    const double dt = exponential(rng, total);
    if (budget.kind == Budget::Kind::Horizon && s + dt >= budget.horizon) {
      tr.local_time(i) += budget.horizon - s;
      s = budget.horizon;
      tr.truncated = true;
      break;
    }
    tr.local_time(i) += dt;
    s += dt;
    i = row[pick(w, total, rng)].first;
    tr.jump_times.push_back(s);
    tr.states.push_back(i);
  }
  tr.horizon = s;
  return tr;
}

double log_rn_density(const WeightedGraph& g, Vertex i0, const Trajectory& z) {
  const Eigen::VectorXd& l = z.local_time;
  if (static_cast<std::size_t>(l.size()) != g.size()) throw GraphError("local time size mismatch");
  double out = 0.0;
  for (const auto& e : g.edges()) out -= e.w * (std::sqrt((1.0 + l(e.i)) * (1.0 + l(e.j))) - 1.0);
  for (Vertex i = 0; i < g.size(); ++i) {
    out += 0.5 * g.degree_weight(i) * l(i);
    if (i != i0) out -= 0.5 * std::log1p(l(i));
  }
  return out;
}

double rn_density(const WeightedGraph& g, Vertex i0, const Trajectory& z) { return std::exp(log_rn_density(g, i0, z)); }

RateEstimate estimate_rates_from_traj(const Trajectory& t, std::size_t n_vertices) {
  RateEstimate est{RateField(n_vertices), RateField(n_vertices), std::vector<std::size_t>(n_vertices, 0),
                   std::vector<char>(n_vertices, 0)};
  std::vector<double> time_in(n_vertices, 0.0);
  std::vector<std::vector<std::pair<Vertex, std::size_t>>> counts(n_vertices);
  double prev = 0.0;
  for (std::size_t k = 0; k < t.jump_times.size(); ++k) {
    const Vertex i = t.states[k], j = t.states[k + 1];
    time_in.at(i) += t.jump_times[k] - prev;
    prev = t.jump_times[k];
    ++est.visits[i];
    auto& row = counts[i];
    auto it = std::find_if(row.begin(), row.end(), [j](const auto& e) { return e.first == j; });
    if (it == row.end())
      row.emplace_back(j, 1);
    else
      ++it->second;
  }
  for (Vertex i = 0; i < n_vertices; ++i) {
    if (est.visits[i] < 2) continue;
    est.estimated[i] = 1;
    for (const auto& [j, c] : counts[i]) {
      est.rates.set(i, j, static_cast<double>(c) / time_in[i]);
      est.std_error.set(i, j, std::sqrt(static_cast<double>(c)) / time_in[i]);
    }
  }
  return est;
}

}  // namespace vrjp

#include "vrjp/representation.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "vrjp/green.hpp"

namespace vrjp {

namespace {
Eigen::Index ix(Vertex v) { return static_cast<Eigen::Index>(v); }
}  // namespace

std::string to_string(RepKind k) {
  switch (k) {
    case RepKind::WiredStandard: return "wired";
    case RepKind::TreeFree: return "free";
    case RepKind::TreeBm: return "bm";
  }
  return "unknown";
}

RateField rates_from_green_row(const WeightedGraph& g, const Eigen::VectorXd& green_row) {
  RateField r(g.size());
  for (Vertex i = 0; i < g.size(); ++i)
    for (const auto& nb : g.neighbors(i)) r.set(i, nb.to, 0.5 * nb.w * green_row(ix(nb.to)) / green_row(ix(i)));
  return r;
}

Representation standard_rep(const BoundaryGraph& bg, const Eigen::VectorXd& beta_full, Vertex i0) {
  const std::size_t k = bg.interior_size();
  if (bg.boundary_size() != 1) throw GraphError("standard representation needs a wired boundary");
  if (i0 >= k) throw GraphError("start vertex must be interior");
  Representation rep;
  rep.kind = RepKind::WiredStandard;
  rep.i0 = i0;
  rep.graph = bg.full();
  if (static_cast<std::size_t>(beta_full.size()) != rep.graph.size()) throw GraphError("beta must include delta");
  rep.beta = beta_full;
  const Eigen::MatrixXd g = spd_inverse(HOperator(rep.graph, beta_full).dense());
  rep.green_row = g.row(ix(i0)).transpose();
  rep.gamma = 1.0 / (2.0 * g(ix(i0), ix(i0)));
  rep.gamma_boundary = 1.0 / (2.0 * g(ix(k), ix(k)));

  std::vector<Vertex> interior(k);
  for (Vertex i = 0; i < k; ++i) interior[i] = i;
  const Eigen::MatrixXd ghat = spd_inverse(h_restricted(rep.graph, beta_full, interior));
  const Eigen::VectorXd psi = ghat * bg.eta;
  for (Vertex j = 0; j < k; ++j) {
    const double dec = ghat(ix(i0), ix(j)) + psi(ix(i0)) * psi(ix(j)) / (2.0 * rep.gamma_boundary);
    const double direct = g(ix(i0), ix(j));
    if (std::abs(dec - direct) > 1e-8 * std::abs(direct)) throw std::runtime_error("wired Green decomposition mismatch");
  }
  rep.rates = rates_from_green_row(rep.graph, rep.green_row);
  return rep;
}

Representation free_rep(const RootedTree& t, Rng& rng) {
  Representation rep;
  rep.kind = RepKind::TreeFree;
  rep.i0 = t.root;
  rep.graph = t.graph;
  rep.rates = RateField(t.graph.size());
  rep.A = Eigen::VectorXd::Ones(ix(t.graph.size()));
  for (Vertex i = 0; i < t.graph.size(); ++i) {
    if (i == t.root) continue;
    const Vertex p = t.parent[i];
    const double w = t.graph.weight(p, i);
    const double a = sample_inverse_gaussian(1.0, w, rng);
    rep.A(ix(i)) = a;
    rep.rates.set(p, i, 0.5 * w * a);
    rep.rates.set(i, p, 0.5 * w / a);
  }
  return rep;
}

Representation bm_rep(const TreeBoundary& tb, const Eigen::VectorXd& rho, Vertex i0) {
  if (i0 >= tb.interior_size()) throw GraphError("start vertex must be interior");
  Representation rep;
  rep.kind = RepKind::TreeBm;
  rep.m = tb.m();
  rep.i0 = i0;
  rep.graph = tb.boundary_graph().full();
  rep.rho = rho;
  const auto k = ix(tb.interior_size());
  rep.beta.resize(k + rho.size());
  rep.beta.head(k) = tb.beta();
  rep.beta.tail(rho.size()) = boundary_beta_from_rho(tb, rho);
  const Eigen::MatrixXd g = g_m_n_matrix(tb, rho);
  rep.green_row = g.row(ix(i0)).transpose();
  rep.gamma = 1.0 / (2.0 * g(ix(i0), ix(i0)));
  rep.rates = rates_from_green_row(rep.graph, rep.green_row);
  return rep;
}

double cycle_consistency(const WeightedGraph& g, const RateField& r) {
  auto t = [&](Vertex i, Vertex j) {
    const double rij = r.rate(i, j);
    if (!(rij > 0.0)) throw std::domain_error("zero rate on a cycle edge");
    return 2.0 * rij / g.weight(i, j);
  };
  double worst = 0.0;
  for (const auto& e : g.edges()) worst = std::max(worst, std::abs(t(e.i, e.j) * t(e.j, e.i) - 1.0));

  // BFS spanning forest.
  const std::size_t n = g.size();
  std::vector<Vertex> parent(n, kNoVertex);
  std::vector<long> depth(n, -1);
  for (Vertex s = 0; s < n; ++s) {
    if (depth[s] >= 0) continue;
    depth[s] = 0;
    std::deque<Vertex> q{s};
    while (!q.empty()) {
      Vertex v = q.front();
      q.pop_front();
      for (const auto& nb : g.neighbors(v)) {
        if (depth[nb.to] < 0) {
          depth[nb.to] = depth[v] + 1;
          parent[nb.to] = v;
          q.push_back(nb.to);
        }
      }
    }
  }
  for (const auto& e : g.edges()) {
    if (parent[e.j] == e.i || parent[e.i] == e.j) continue;
    // Cycle: e.i up to the meeting vertex, down to e.j, then back along (e.j, e.i).
    std::vector<Vertex> up{e.i}, down{e.j};
    while (up.back() != down.back()) {
      if (depth[up.back()] >= depth[down.back()])
        up.push_back(parent[up.back()]);
      else
        down.push_back(parent[down.back()]);
    }
    double prod = 1.0;
    for (std::size_t a = 0; a + 1 < up.size(); ++a) prod *= t(up[a], up[a + 1]);
    for (std::size_t a = down.size() - 1; a > 0; --a) prod *= t(down[a], down[a - 1]);
    prod *= t(e.j, e.i);
    worst = std::max(worst, std::abs(prod - 1.0));
  }
  return worst;
}

ReconstructedEnv reconstruct_env(const RateField& r, double gamma, Vertex i0, const WeightedGraph& g,
                                 const std::vector<Vertex>& interior_in, double cycle_tol) {
  const std::size_t n = g.size();
  if (r.size() != n) throw GraphError("rate field size mismatch");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const double defect = cycle_consistency(g, r);
  if (!(defect <= cycle_tol)) throw std::domain_error("rate field is not cycle consistent");
  std::vector<Vertex> interior = interior_in;
  if (interior.empty()) {
    interior.resize(n);
    for (Vertex v = 0; v < n; ++v) interior[v] = v;
  }
  ReconstructedEnv env;
  env.gamma = gamma;
  env.beta.resize(ix(n));
  for (Vertex i = 0; i < n; ++i) env.beta(ix(i)) = r.holding(i) + (i == i0 ? gamma : 0.0);

  env.u = Eigen::VectorXd::Constant(ix(n), std::numeric_limits<double>::quiet_NaN());
  env.u(ix(i0)) = 0.0;
  std::deque<Vertex> q{i0};
  while (!q.empty()) {
    Vertex v = q.front();
    q.pop_front();
    for (const auto& nb : g.neighbors(v)) {
      if (std::isnan(env.u(ix(nb.to)))) {
        env.u(ix(nb.to)) = env.u(ix(v)) + std::log(2.0 * r.rate(v, nb.to) / nb.w);
        q.push_back(nb.to);
      }
    }
  }
  if (env.u.hasNaN()) throw GraphError("graph is not connected");
  env.green_row = env.u.array().exp() / (2.0 * gamma);

  std::size_t a0 = interior.size();
  for (std::size_t a = 0; a < interior.size(); ++a)
    if (interior[a] == i0) a0 = a;
  if (a0 == interior.size()) throw GraphError("start vertex must be interior");
  const Eigen::MatrixXd hint = h_restricted(g, env.beta, interior);
  Eigen::LLT<Eigen::MatrixXd> llt(hint);
  if (llt.info() != Eigen::Success) throw std::domain_error("reconstructed interior operator is not positive definite");
  const Eigen::VectorXd col = llt.solve(Eigen::VectorXd::Unit(ix(interior.size()), ix(a0)));
  env.hat_row = Eigen::VectorXd::Zero(ix(n));
  for (std::size_t a = 0; a < interior.size(); ++a) env.hat_row(ix(interior[a])) = col(ix(a));
  env.h = env.green_row - env.hat_row;
  const Eigen::VectorXd hh = HOperator(g, env.beta).apply(env.h);
  env.residual = Eigen::VectorXd::Zero(ix(n));
  for (Vertex v : interior) {
    env.residual(ix(v)) = hh(ix(v));
    env.max_residual = std::max(env.max_residual, std::abs(hh(ix(v))));
  }
  return env;
}

std::vector<double> s_n_statistic(const RateField& r, const std::vector<Vertex>& ray, double W) {
  std::vector<double> s;
  double prod = 1.0;
  for (std::size_t k = 1; k < ray.size(); ++k) {
    prod *= 2.0 / W * r.rate(ray[k - 1], ray[k]);
    s.push_back(prod);
  }
  return s;
}

}  // namespace vrjp

#include "vrjp/green.hpp"

#include <cmath>
#include <string>

namespace vrjp {

NotPositiveDefinite::NotPositiveDefinite(std::size_t pivot, double value)
    : std::runtime_error("matrix not positive definite: pivot " + std::to_string(pivot) + " = " +
                         std::to_string(value)),
      pivot_(pivot),
      value_(value) {}

HOperator::HOperator(const WeightedGraph& g, Eigen::VectorXd beta) : g_(&g), beta_(std::move(beta)) {
  if (static_cast<std::size_t>(beta_.size()) != g.size()) throw GraphError("beta size does not match graph");
}

Eigen::VectorXd HOperator::apply(const Eigen::VectorXd& f) const {
  const auto& g = *g_;
  Eigen::VectorXd out(f.size());
  for (Vertex i = 0; i < g.size(); ++i) {
    double s = (2.0 * beta_(i) - g.self_weight(i)) * f(i);
    for (const auto& nb : g.neighbors(i)) s -= nb.w * f(nb.to);
    out(i) = s;
  }
  return out;
}

Eigen::MatrixXd HOperator::dense() const {
  Eigen::MatrixXd h = -g_->dense();
  h.diagonal() += 2.0 * beta_;
  return h;
}

Eigen::SparseMatrix<double> HOperator::sparse() const {
  const auto& g = *g_;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(g.size() + 2 * g.edge_count());
  for (Vertex i = 0; i < g.size(); ++i) {
    trip.emplace_back(i, i, 2.0 * beta_(i) - g.self_weight(i));
    for (const auto& nb : g.neighbors(i)) trip.emplace_back(i, nb.to, -nb.w);
  }
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::SparseMatrix<double> h(n, n);
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

HOperator h_beta(const WeightedGraph& g, const Eigen::VectorXd& beta) { return HOperator(g, beta); }

Eigen::MatrixXd h_restricted(const WeightedGraph& g, const Eigen::VectorXd& beta, const std::vector<Vertex>& vn) {
  const auto k = static_cast<Eigen::Index>(vn.size());
  Eigen::MatrixXd h(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) h(a, b) = -g.weight(vn[a], vn[b]);
  for (Eigen::Index a = 0; a < k; ++a) h(a, a) += 2.0 * beta(vn[a]);
  return h;
}

namespace {

// Unblocked Cholesky, used only to locate the failing pivot.
void throw_failing_pivot(const Eigen::MatrixXd& h) {
  const Eigen::Index n = h.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = h(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) throw NotPositiveDefinite(static_cast<std::size_t>(j), d);
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) l(i, j) = (h(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
  }
  throw NotPositiveDefinite(static_cast<std::size_t>(n), 0.0);
}

}  // namespace

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& h) {
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) throw_failing_pivot(h);
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(h.rows(), h.cols()));
  return 0.5 * (inv + inv.transpose());
}

GreenMatrix green(const HOperator& h) { return green(h.dense(), GreenKind::Full); }

GreenMatrix green(const Eigen::MatrixXd& h, GreenKind kind) { return {spd_inverse(h), kind}; }

double f_ratio(const GreenMatrix& g, Vertex i, Vertex j) {
  return g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) /
         g.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
}

GreenMatrix hat_green_restricted(const WeightedGraph& g, const Eigen::VectorXd& beta, const std::vector<Vertex>& vn) {
  Eigen::MatrixXd inv = spd_inverse(h_restricted(g, beta, vn));
  const auto n = static_cast<Eigen::Index>(g.size());
  GreenMatrix out{Eigen::MatrixXd::Zero(n, n), GreenKind::Restricted};
  for (std::size_t a = 0; a < vn.size(); ++a)
    for (std::size_t b = 0; b < vn.size(); ++b) out.values(vn[a], vn[b]) = inv(a, b);
  return out;
}

Eigen::VectorXd psi_restricted(const WeightedGraph& g, const Eigen::VectorXd& beta, const std::vector<Vertex>& vn,
                               const Eigen::VectorXd& eta) {
  if (static_cast<std::size_t>(eta.size()) != vn.size()) throw GraphError("eta size does not match V_n");
  Eigen::MatrixXd h = h_restricted(g, beta, vn);
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) throw_failing_pivot(h);
  return llt.solve(eta);
}

Eigen::VectorXd psi_restricted(const WeightedGraph& g, const Eigen::VectorXd& beta, const std::vector<Vertex>& vn) {
  return psi_restricted(g, beta, vn, outward_weights(g, vn));
}

double psi_residual(const WeightedGraph& g, const Eigen::VectorXd& beta, const std::vector<Vertex>& vn,
                    const Eigen::VectorXd& eta, const Eigen::VectorXd& psi) {
  Eigen::VectorXd r = h_restricted(g, beta, vn) * psi - eta;
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

namespace {

struct DfsState {
  const WeightedGraph& g;
  const Eigen::VectorXd& beta;
  Vertex target;
  std::size_t max_len;
  std::size_t budget;
  double prune;
  std::size_t nodes = 0;
  double sum = 0.0;
};

void visit(DfsState& s, Vertex u, std::size_t len, double w, bool f_mode) {
  if (++s.nodes > s.budget) throw PathBudgetExceeded("path enumeration exceeded node budget");
  if (len == s.max_len) return;
  auto step = [&](Vertex v, double wuv) {
    if (f_mode) {
      const double nw = w * wuv / (2.0 * s.beta(u));
      if (nw < s.prune) return;
      if (v == s.target) {
        s.sum += nw;
        return;
      }
      visit(s, v, len + 1, nw, f_mode);
    } else {
      const double nw = w * wuv / (2.0 * s.beta(v));
      if (nw < s.prune) return;
      if (v == s.target) s.sum += nw;
      visit(s, v, len + 1, nw, f_mode);
    }
  };
  if (s.g.self_weight(u) > 0.0) step(u, s.g.self_weight(u));
  for (const auto& nb : s.g.neighbors(u)) step(nb.to, nb.w);
}

}  // namespace

double path_sum_green(const WeightedGraph& g, const Eigen::VectorXd& beta, Vertex i, Vertex j,
                      const PathSumConfig& cfg) {
  const double start = 1.0 / (2.0 * beta(i));
  if (cfg.method == PathSumConfig::Method::DepthFirst) {
    DfsState s{g, beta, j, cfg.max_length, cfg.node_budget, cfg.prune_below};
    if (i == j) s.sum = start;
    visit(s, i, 0, start, false);
    return s.sum;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  x(i) = start;
  double sum = (i == j) ? start : 0.0;
  Eigen::VectorXd y(x.size());
  for (std::size_t len = 1; len <= cfg.max_length; ++len) {
    y.setZero();
    for (Vertex u = 0; u < g.size(); ++u) {
      if (x(u) == 0.0) continue;
      y(u) += x(u) * g.self_weight(u);
      for (const auto& nb : g.neighbors(u)) y(nb.to) += x(u) * nb.w;
    }
    x = y.cwiseQuotient(2.0 * beta);
    sum += x(j);
  }
  return sum;
}

double path_sum_F(const WeightedGraph& g, const Eigen::VectorXd& beta, Vertex i, Vertex j, const PathSumConfig& cfg) {
  if (i == j) return 1.0;
  if (cfg.method == PathSumConfig::Method::DepthFirst) {
    DfsState s{g, beta, j, cfg.max_length, cfg.node_budget, cfg.prune_below};
    visit(s, i, 0, 1.0, true);
    return s.sum;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  x(i) = 1.0;
  double sum = 0.0;
  Eigen::VectorXd y(x.size());
  for (std::size_t len = 1; len <= cfg.max_length; ++len) {
    y.setZero();
    for (Vertex u = 0; u < g.size(); ++u) {
      if (x(u) == 0.0) continue;
      const double a = x(u) / (2.0 * beta(u));
      y(u) += a * g.self_weight(u);
      for (const auto& nb : g.neighbors(u)) y(nb.to) += a * nb.w;
    }
    sum += y(j);
    y(j) = 0.0;
    x.swap(y);
  }
  return sum;
}

std::vector<Vertex> complement(std::size_t n, const std::vector<Vertex>& U) {
  std::vector<char> in(n, 0);
  for (Vertex u : U) in.at(u) = 1;
  std::vector<Vertex> out;
  for (Vertex v = 0; v < n; ++v)
    if (!in[v]) out.push_back(v);
  return out;
}

Eigen::MatrixXd schur(const Eigen::MatrixXd& h, const std::vector<Vertex>& U) {
  const auto R = complement(static_cast<std::size_t>(h.rows()), U);
  const auto ku = static_cast<Eigen::Index>(U.size()), kr = static_cast<Eigen::Index>(R.size());
  Eigen::MatrixXd huu(ku, ku), hur(ku, kr), hrr(kr, kr);
  for (Eigen::Index a = 0; a < ku; ++a) {
    for (Eigen::Index b = 0; b < ku; ++b) huu(a, b) = h(U[a], U[b]);
    for (Eigen::Index b = 0; b < kr; ++b) hur(a, b) = h(U[a], R[b]);
  }
  for (Eigen::Index a = 0; a < kr; ++a)
    for (Eigen::Index b = 0; b < kr; ++b) hrr(a, b) = h(R[a], R[b]);
  if (ku == 0) return hrr;
  Eigen::LLT<Eigen::MatrixXd> llt(huu);
  if (llt.info() != Eigen::Success) throw_failing_pivot(huu);
  Eigen::MatrixXd x = llt.matrixL().solve(hur);
  Eigen::MatrixXd s = hrr - x.transpose() * x;
  return 0.5 * (s + s.transpose());
}

double harmonic_residual(const Eigen::MatrixXd& h, const Eigen::VectorXd& f, const std::vector<Vertex>& U) {
  Eigen::VectorXd r = h * f;
  double m = 0.0;
  for (Vertex u : U) m = std::max(m, std::abs(r(static_cast<Eigen::Index>(u))));
  return m;
}

double harmonic_residual(const HOperator& h, const Eigen::VectorXd& f, const std::vector<Vertex>& U) {
  Eigen::VectorXd r = h.apply(f);
  double m = 0.0;
  for (Vertex u : U) m = std::max(m, std::abs(r(static_cast<Eigen::Index>(u))));
  return m;
}

}  // namespace vrjp

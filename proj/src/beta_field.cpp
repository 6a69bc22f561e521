#include "vrjp/beta_field.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <deque>
#include <numbers>

#include "vrjp/green.hpp"

namespace vrjp {

NuParams NuParams::zero_eta(WeightedGraph g) {
  NuParams p{std::move(g), {}};
  p.eta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.graph.size()));
  return p;
}

void NuParams::validate() const {
  if (static_cast<std::size_t>(eta.size()) != graph.size()) throw GraphError("eta size does not match graph");
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    if (!(eta(i) >= 0.0) || !std::isfinite(eta(i))) throw GraphError("eta must be nonnegative and finite");
}

bool in_domain(const WeightedGraph& g, const Eigen::VectorXd& beta) {
  if (!beta.allFinite()) return false;
  HOperator h(g, beta);
  if (g.size() <= 3000) {
    Eigen::LLT<Eigen::MatrixXd> llt(h.dense());
    return llt.info() == Eigen::Success;
  }
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(h.sparse());
  return llt.info() == Eigen::Success;
}

double nu_log_density(const NuParams& p, const Eigen::VectorXd& beta) {
  p.validate();
  if (static_cast<std::size_t>(beta.size()) != p.graph.size()) throw GraphError("beta size does not match graph");
  const Eigen::MatrixXd h = HOperator(p.graph, beta).dense();
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd l = llt.matrixL();
  const double logdet = 2.0 * l.diagonal().array().log().sum();
  const double one_h_one = h.sum();
  const double eta_g_eta = p.eta.dot(llt.solve(p.eta));
  const double n = static_cast<double>(beta.size());
  return 0.5 * n * std::log(2.0 / std::numbers::pi) - 0.5 * (one_h_one + eta_g_eta) + p.eta.sum() - 0.5 * logdet;
}

double nu_density(const NuParams& p, const Eigen::VectorXd& beta) { return std::exp(nu_log_density(p, beta)); }

double nu_laplace(const NuParams& p, const Eigen::VectorXd& lambda) {
  p.validate();
  const auto& g = p.graph;
  if (static_cast<std::size_t>(lambda.size()) != g.size()) throw GraphError("lambda size does not match graph");
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    if (!(lambda(i) >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  const Eigen::ArrayXd s = (1.0 + lambda.array()).sqrt();
  double expo = 0.0;
  for (Vertex i = 0; i < g.size(); ++i) {
    expo -= p.eta(i) * (s(i) - 1.0);
    expo -= 0.5 * lambda(i) * g.self_weight(i);
    expo -= 0.5 * std::log1p(lambda(i));
  }
  for (const auto& e : g.edges()) expo -= e.w * (s(e.i) * s(e.j) - 1.0);
  return std::exp(expo);
}

namespace {

WeightedGraph induced_with_diag(const WeightedGraph& g, const std::vector<Vertex>& U) {
  Eigen::MatrixXd w = g.dense();
  const auto k = static_cast<Eigen::Index>(U.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = w(U[a], U[b]);
  return WeightedGraph::from_dense(sub);
}

}  // namespace

NuParams marginal_params(const NuParams& p, const std::vector<Vertex>& U) {
  p.validate();
  if (U.empty()) throw GraphError("marginal on empty set");
  std::vector<char> in(p.graph.size(), 0);
  for (Vertex u : U) in.at(u) = 1;
  NuParams out{induced_with_diag(p.graph, U), Eigen::VectorXd(static_cast<Eigen::Index>(U.size()))};
  for (std::size_t a = 0; a < U.size(); ++a) {
    double s = p.eta(U[a]);
    for (const auto& nb : p.graph.neighbors(U[a]))
      if (!in[nb.to]) s += nb.w;
    out.eta(static_cast<Eigen::Index>(a)) = s;
  }
  return out;
}

ConditionalParams conditional_params(const NuParams& p, const std::vector<Vertex>& U,
                                     const Eigen::VectorXd& beta_U) {
  p.validate();
  if (static_cast<std::size_t>(beta_U.size()) != U.size()) throw GraphError("beta_U size mismatch");
  const auto R = complement(p.graph.size(), U);
  const Eigen::MatrixXd w = p.graph.dense();
  const auto ku = static_cast<Eigen::Index>(U.size()), kr = static_cast<Eigen::Index>(R.size());
  Eigen::MatrixXd huu(ku, ku), wur(ku, kr), wrr(kr, kr);
  Eigen::VectorXd eta_u(ku), eta_r(kr);
  for (Eigen::Index a = 0; a < ku; ++a) {
    for (Eigen::Index b = 0; b < ku; ++b) huu(a, b) = -w(U[a], U[b]);
    huu(a, a) += 2.0 * beta_U(a);
    for (Eigen::Index b = 0; b < kr; ++b) wur(a, b) = w(U[a], R[b]);
    eta_u(a) = p.eta(U[a]);
  }
  for (Eigen::Index a = 0; a < kr; ++a) {
    for (Eigen::Index b = 0; b < kr; ++b) wrr(a, b) = w(R[a], R[b]);
    eta_r(a) = p.eta(R[a]);
  }
  ConditionalParams out;
  out.vertices = R;
  if (ku == 0) {
    out.params = {WeightedGraph::from_dense(wrr), eta_r};
    return out;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(huu);
  if (llt.info() != Eigen::Success) throw DomainError("conditioning block of H is not positive definite");
  const Eigen::MatrixXd x = llt.matrixL().solve(wur);
  const Eigen::VectorXd y = llt.matrixL().solve(eta_u);
  Eigen::MatrixXd wc = wrr + x.transpose() * x;
  wc = 0.5 * (wc + wc.transpose()).eval();
  Eigen::VectorXd ec = eta_r + x.transpose() * y;
  out.params = {WeightedGraph::from_dense(wc), ec.cwiseMax(0.0)};
  return out;
}

double sample_single_site(const GigParams& g, Rng& rng) {
  if (!(g.w >= 0.0) || !(g.eta >= 0.0)) throw std::invalid_argument("single-site parameters must be nonnegative");
  double t;
  if (g.eta == 0.0) {
    const double z = standard_normal(rng);
    t = z * z;
  } else {
    t = 1.0 / sample_inverse_gaussian(1.0 / g.eta, 1.0, rng);
  }
  return 0.5 * (t + g.w);
}

std::vector<Vertex> default_order(const WeightedGraph& g, const std::vector<Vertex>& sources) {
  std::vector<char> seen(g.size(), 0);
  std::vector<Vertex> order;
  order.reserve(g.size());
  auto bfs = [&](std::deque<Vertex> q) {
    while (!q.empty()) {
      Vertex v = q.front();
      q.pop_front();
      order.push_back(v);
      for (const auto& nb : g.neighbors(v)) {
        if (!seen[nb.to]) {
          seen[nb.to] = 1;
          q.push_back(nb.to);
        }
      }
    }
  };
  std::deque<Vertex> q;
  for (Vertex s : sources) {
    if (s < g.size() && !seen[s]) {
      seen[s] = 1;
      q.push_back(s);
    }
  }
  bfs(std::move(q));
  for (Vertex v = 0; v < g.size(); ++v) {
    if (!seen[v]) {
      seen[v] = 1;
      bfs({v});
    }
  }
  return order;
}

namespace {

// Keeps A = (H_UU)^{-1} restricted to the frontier F and p = A t_U restricted
// to F, where t_u = eta_u + W_{u,R} 1 and R is the undrawn set.
class FrontierSweep {
 public:
  FrontierSweep(const NuParams& p) : p_(p), n_(p.graph.size()), pos_(n_, kNone), rem_(n_, 0), in_r_(n_, 1) {
    for (Vertex v = 0; v < n_; ++v) rem_[v] = p.graph.neighbors(v).size();
    reserve(16);
  }

  // Draws (or, when fixed >= 0 is supplied, imposes) beta_v. Returns beta_v.
  double step(Vertex v, double fixed, bool use_fixed, Rng& rng) {
    const auto& g = p_.graph;
    const auto f = static_cast<Eigen::Index>(frontier_.size());
    a_.head(f).setZero();
    double q = 0.0, bp = 0.0, tv = p_.eta(v);
    nb_.clear();
    for (const auto& nb : g.neighbors(v)) {
      if (in_r_[nb.to]) {
        tv += nb.w;
      } else {
        const auto k = static_cast<Eigen::Index>(pos_[nb.to]);
        nb_.push_back({k, nb.w});
        a_.head(f).noalias() += nb.w * m_.col(k).head(f);
        bp += nb.w * p_vec_(k);
      }
    }
    for (const auto& [k, w] : nb_) q += w * a_(k);
    double c = tv + bp - q;
    const double scale = std::abs(tv) + std::abs(bp) + std::abs(q) + 1.0;
    if (c < 0.0) {
      if (c < -1e-9 * scale) throw DomainError("negative conditional eta");
      c = 0.0;
    } else if (c < 1e-14 * scale && p_.eta(v) == 0.0 && tv == 0.0) {
      c = 0.0;  // exact zero up to roundoff (last vertex of an eta-free component)
    }
    const double wself = g.self_weight(v) + q;
    double beta, s;
    if (use_fixed) {
      beta = fixed;
      s = 2.0 * beta - wself;
      if (!(s > 0.0)) throw DomainError("fixed potential outside the domain");
    } else {
      beta = sample_single_site({wself, c}, rng);
      s = 2.0 * beta - wself;
      if (!(s > 0.0)) throw DomainError("degenerate single-site draw");
    }

    in_r_[v] = 0;
    for (const auto& nb : g.neighbors(v)) --rem_[nb.to];

    if (f > 0) {
      m_.topLeftCorner(f, f).noalias() += (a_.head(f) / s) * a_.head(f).transpose();
      p_vec_.head(f) += a_.head(f) * (c / s - 1.0);
    }
    if (rem_[v] > 0) {
      if (f + 1 > m_.rows()) reserve(2 * (f + 1));
      m_.col(f).head(f) = a_.head(f) / s;
      m_.row(f).head(f) = a_.head(f).transpose() / s;
      m_(f, f) = 1.0 / s;
      p_vec_(f) = c / s;
      pos_[v] = static_cast<std::size_t>(f);
      frontier_.push_back(v);
    }
    for (const auto& nb : g.neighbors(v))
      if (!in_r_[nb.to] && rem_[nb.to] == 0 && pos_[nb.to] != kNone) drop(nb.to);
    return beta;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  void reserve(Eigen::Index cap) {
    const Eigen::Index f = static_cast<Eigen::Index>(frontier_.size());
    Eigen::MatrixXd m(cap, cap);
    Eigen::VectorXd pv(cap);
    if (f > 0) {
      m.topLeftCorner(f, f) = m_.topLeftCorner(f, f);
      pv.head(f) = p_vec_.head(f);
    }
    m_.swap(m);
    p_vec_.swap(pv);
    a_.conservativeResize(cap);  // a_ is live when growth happens mid-step
  }

  void drop(Vertex u) {
    const auto k = static_cast<Eigen::Index>(pos_[u]);
    const auto last = static_cast<Eigen::Index>(frontier_.size()) - 1;
    if (k != last) {
      const Vertex moved = frontier_[static_cast<std::size_t>(last)];
      m_.row(k).head(last + 1) = m_.row(last).head(last + 1);
      m_.col(k).head(last + 1) = m_.col(last).head(last + 1);
      m_(k, k) = m_(last, last);
      p_vec_(k) = p_vec_(last);
      frontier_[static_cast<std::size_t>(k)] = moved;
      pos_[moved] = static_cast<std::size_t>(k);
    }
    frontier_.pop_back();
    pos_[u] = kNone;
  }

  const NuParams& p_;
  std::size_t n_;
  std::vector<std::size_t> pos_;
  std::vector<std::size_t> rem_;
  std::vector<char> in_r_;
  std::vector<Vertex> frontier_;
  std::vector<std::pair<Eigen::Index, double>> nb_;
  Eigen::MatrixXd m_;
  Eigen::VectorXd p_vec_;
  Eigen::VectorXd a_;
};

std::vector<Vertex> resolve_order(const NuParams& p, const std::vector<Vertex>& fixed, const SampleOptions& opt) {
  const std::size_t n = p.graph.size();
  std::vector<char> used(n, 0);
  std::vector<Vertex> order;
  order.reserve(n);
  for (Vertex v : fixed) {
    if (v >= n || used[v]) throw GraphError("invalid or repeated fixed vertex");
    used[v] = 1;
    order.push_back(v);
  }
  const auto rest = opt.order.empty() ? default_order(p.graph, fixed.empty() ? std::vector<Vertex>{0} : fixed)
                                      : opt.order;
  for (Vertex v : rest) {
    if (v >= n) throw GraphError("order contains invalid vertex");
    if (!used[v]) {
      used[v] = 1;
      order.push_back(v);
    }
  }
  if (order.size() != n) throw GraphError("elimination order does not cover the graph");
  return order;
}

}  // namespace

BetaSample sample_nu_conditional(const NuParams& p, const std::vector<Vertex>& fixed,
                                 const Eigen::VectorXd& fixed_beta, Rng& rng, const SampleOptions& opt) {
  p.validate();
  if (static_cast<std::size_t>(fixed_beta.size()) != fixed.size()) throw GraphError("fixed beta size mismatch");
  const auto order = resolve_order(p, fixed, opt);
  BetaSample out;
  out.beta.resize(static_cast<Eigen::Index>(p.graph.size()));
  std::string last = "domain check";
  for (std::size_t attempt = 0; attempt < opt.max_attempts; ++attempt) {
    FrontierSweep sweep(p);
    bool ok = true;
    try {
      for (std::size_t k = 0; k < order.size(); ++k) {
        const bool fx = k < fixed.size();
        out.beta(order[k]) = sweep.step(order[k], fx ? fixed_beta(k) : 0.0, fx, rng);
      }
    } catch (const DomainError& e) {
      last = e.what();
      if (!fixed.empty()) {
        // A fixed value outside the domain cannot be cured by redrawing.
        Eigen::VectorXd fb(static_cast<Eigen::Index>(fixed.size()));
        for (std::size_t k = 0; k < fixed.size(); ++k) fb(k) = fixed_beta(k);
        WeightedGraph sub = marginal_params(p, fixed).graph;
        if (!in_domain(sub, fb)) throw;
      }
      ok = false;
    }
    if (ok && (!opt.verify_domain || in_domain(p.graph, out.beta))) return out;
    ++out.rejections;
  }
  throw DomainError("sampler exceeded retry budget (last failure: " + last + ")");
}

BetaSample sample_nu(const NuParams& p, Rng& rng, const SampleOptions& opt) {
  return sample_nu_conditional(p, {}, Eigen::VectorXd(), rng, opt);
}

BetaSample extend_to_boundary(const BoundaryGraph& bg, const Eigen::VectorXd& beta_interior, Rng& rng) {
  const std::size_t k = bg.interior_size();
  if (static_cast<std::size_t>(beta_interior.size()) != k) throw GraphError("interior beta size mismatch");
  NuParams full = NuParams::zero_eta(bg.full());
  std::vector<Vertex> fixed(k);
  for (Vertex i = 0; i < k; ++i) fixed[i] = i;
  std::vector<Vertex> order(full.graph.size());
  for (Vertex i = 0; i < order.size(); ++i) order[i] = i;
  SampleOptions opt;
  opt.order = order;
  return sample_nu_conditional(full, fixed, beta_interior, rng, opt);
}

}  // namespace vrjp

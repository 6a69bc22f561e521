#include "vrjp/tree_boundary.hpp"

#include <cmath>
#include <stdexcept>

#include "vrjp/green.hpp"

namespace vrjp {

namespace {
Eigen::Index ix(Vertex v) { return static_cast<Eigen::Index>(v); }
}  // namespace

TreeBoundary::TreeBoundary(const RootedTree& t, const Eigen::VectorXd& beta, int m, int n)
    : t_(&t), m_(m), n_(n), bg_(restrict_tree_bm(t, m, n)) {
  k_ = t.truncation_size(n);
  if (static_cast<std::size_t>(beta.size()) < k_) throw GraphError("beta does not cover T^(n)");
  beta_ = beta.head(ix(k_));
  cells_ = t.generation(m);
  hat_g_ = spd_inverse(h_restricted(bg_.interior, beta_, t.truncation(n)));
  eta_ = bg_.eta;
  psi_ = hat_g_ * eta_;
  chi_ = hat_g_ * bg_.boundary_weights;
}

Eigen::VectorXd TreeBoundary::chi_rhs(std::size_t c) const { return bg_.boundary_weights.col(ix(c)); }

Eigen::MatrixXd TreeBoundary::chi_depth(int k) const {
  if (k < 0 || k > n_) throw GraphError("chi depth out of range");
  const auto& gen = t_->generation(k);
  const Vertex first = gen.front();
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(ix(k_), ix(gen.size()));
  for (Vertex i : t_->generation(n_)) rhs(ix(i), ix(t_->ancestor(i, k) - first)) = eta_(ix(i));
  return hat_g_ * rhs;
}

Eigen::MatrixXd TreeBoundary::w_check() const {
  Eigen::MatrixXd w = bg_.boundary_weights.transpose() * chi_;
  return 0.5 * (w + w.transpose());
}

double TreeBoundary::f(Vertex i, Vertex j) const {
  return (psi_(ix(j)) / psi_(ix(i))) * hat_g_(ix(i), ix(j)) / hat_g_(ix(j), ix(j));
}

Eigen::MatrixXd chi_solve(const RootedTree& t, const Eigen::VectorXd& beta, int m, int n) {
  return TreeBoundary(t, beta, m, n).chi();
}

ChiClosed chi_closed(const TreeBoundary& tb) {
  const auto& t = tb.tree();
  const auto& psi = tb.psi();
  const std::size_t k = tb.interior_size();
  const auto& cells = tb.cells();
  ChiClosed out{Eigen::MatrixXd(ix(k), ix(cells.size())), 0};
  constexpr double tiny = 1e-280;
  for (Vertex i = 0; i < k; ++i) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const Vertex x = cells[c];
      if (tb.m() == 0) {
        out.chi(ix(i), ix(c)) = psi(ix(i));
        continue;
      }
      const Vertex px = t.parent[x];
      if (!(psi(ix(i)) > tiny && psi(ix(x)) > tiny && psi(ix(px)) > tiny)) {
        out.chi(ix(i), ix(c)) = tb.chi()(ix(i), ix(c));
        ++out.fallbacks;
        continue;
      }
      const double fix = tb.f(i, x), fxp = tb.f(x, px), fpx = tb.f(px, x);
      const double den = 1.0 - fxp * fpx;
      const bool below = i != x && t.in_subtree(i, x);
      const double mu = (below ? 1.0 - fix : 0.0) + fix * (1.0 - fxp) / den;
      out.chi(ix(i), ix(c)) = psi(ix(i)) * mu;
    }
  }
  return out;
}

ChiClosed chi_closed(const RootedTree& t, const Eigen::VectorXd& beta, int m, int n) {
  return chi_closed(TreeBoundary(t, beta, m, n));
}

Eigen::MatrixXd check_matrix(const TreeBoundary& tb) {
  const auto& cells = tb.cells();
  const auto nb = ix(cells.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(nb, nb);
  const auto& chi = tb.chi();
  for (Eigen::Index a = 0; a < nb; ++a) {
    for (Eigen::Index b = a + 1; b < nb; ++b) {
      const Vertex z = tree_meet(tb.tree(), cells[a], cells[b]);
      const double v = chi(ix(z), a) * chi(ix(z), b) / tb.hat_green()(ix(z), ix(z));
      c(a, b) = v;
      c(b, a) = v;
    }
  }
  return c;
}

Eigen::MatrixXd check_matrix(const RootedTree& t, const Eigen::VectorXd& beta, int m, int n) {
  return check_matrix(TreeBoundary(t, beta, m, n));
}

Eigen::MatrixXd check_green(const Eigen::VectorXd& rho, const Eigen::MatrixXd& c) {
  Eigen::MatrixXd h = -c;
  h.diagonal() += 2.0 * rho;
  return spd_inverse(h);
}

Eigen::VectorXd rho_from_boundary_beta(const TreeBoundary& tb, const Eigen::VectorXd& beta_boundary) {
  return beta_boundary - 0.5 * tb.w_check().diagonal();
}

Eigen::VectorXd boundary_beta_from_rho(const TreeBoundary& tb, const Eigen::VectorXd& rho) {
  return rho + 0.5 * tb.w_check().diagonal();
}

Eigen::MatrixXd g_m_n_matrix(const TreeBoundary& tb, const Eigen::VectorXd& rho) {
  const Eigen::MatrixXd gb = check_green(rho, check_matrix(tb));
  const Eigen::MatrixXd cg = tb.chi() * gb;
  const auto k = ix(tb.interior_size()), nb = gb.rows();
  Eigen::MatrixXd g(k + nb, k + nb);
  Eigen::MatrixXd tt = tb.hat_green() + cg * tb.chi().transpose();
  g.topLeftCorner(k, k) = 0.5 * (tt + tt.transpose());
  g.topRightCorner(k, nb) = cg;
  g.bottomLeftCorner(nb, k) = cg.transpose();
  g.bottomRightCorner(nb, nb) = gb;
  return g;
}

double g_m_n(const RootedTree& t, const Eigen::VectorXd& beta, const Eigen::VectorXd& rho, int m, int n, Vertex i,
             Vertex j) {
  TreeBoundary tb(t, beta, m, n);
  const Eigen::MatrixXd gb = check_green(rho, check_matrix(tb));
  return tb.hat_green()(ix(i), ix(j)) + tb.chi().row(ix(i)) * gb * tb.chi().row(ix(j)).transpose();
}

HarmonicMeasureTable harmonic_measure_table(const RootedTree& t, const HittingRatio& f, int row_depth, int cap) {
  if (row_depth < 0 || cap < 0 || row_depth > t.max_depth() || cap > t.max_depth())
    throw GraphError("harmonic measure table depth out of range");
  HarmonicMeasureTable tab;
  tab.row_depth = row_depth;
  tab.cap = cap;
  const auto rows = t.truncation_size(row_depth), cols = t.truncation_size(cap);
  tab.mu.resize(ix(rows), ix(cols));
  for (Vertex x = 0; x < cols; ++x) {
    if (x == t.root) {
      tab.mu.col(ix(x)).setOnes();
      continue;
    }
    const Vertex px = t.parent[x];
    const double fxp = f(x, px), fpx = f(px, x);
    const double den = 1.0 - fpx * fxp;
    if (!(den > 0.0)) throw std::domain_error("degenerate harmonic measure denominator");
    for (Vertex i = 0; i < rows; ++i) {
      const double fix = f(i, x);
      const bool below = i != x && t.in_subtree(i, x);
      tab.mu(ix(i), ix(x)) = (below ? 1.0 - fix : 0.0) + fix * (1.0 - fxp) / den;
    }
  }
  return tab;
}

double exit_measure_rep(const TreeBoundary& tb, const Eigen::VectorXd& rho, Vertex x) {
  const auto& t = tb.tree();
  const int dx = t.depth.at(x);
  if (dx > tb.n()) throw GraphError("exit measure needs |x| <= n");
  const auto& cells = tb.cells();
  const Eigen::VectorXd c = tb.chi().row(ix(t.root)).transpose();
  const Eigen::VectorXd u = check_green(rho, check_matrix(tb)) * c;
  const double den = c.dot(u);
  if (!(den > 0.0)) throw std::domain_error("zero exit-measure normalization");
  double num = 0.0;
  if (dx <= tb.m()) {
    for (std::size_t a = 0; a < cells.size(); ++a)
      if (t.ancestor(cells[a], dx) == x) num += c(ix(a)) * u(ix(a));
  } else {
    if (!(tb.psi()(ix(t.root)) > 0.0)) throw std::domain_error("psi vanishes at the root");
    const Vertex z = t.ancestor(x, tb.m());
    const auto tab = harmonic_measure_table(t, [&](Vertex i, Vertex j) { return tb.f(i, j); }, 0, dx);
    num = u(ix(z - cells.front())) * tb.psi()(ix(t.root)) * tab(t.root, x);
  }
  return num / den;
}

double exit_measure_rep(const RootedTree& t, const Eigen::VectorXd& beta, const Eigen::VectorXd& rho, int m, int n,
                        Vertex x) {
  return exit_measure_rep(TreeBoundary(t, beta, m, n), rho, x);
}

}  // namespace vrjp

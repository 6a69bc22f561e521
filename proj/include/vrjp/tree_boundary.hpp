#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "vrjp/graph.hpp"

namespace vrjp {

// Green-function data of one potential on T^(n) with the B_m boundary.
// Interior indices coincide with tree vertex ids (T^(n) is a BFS prefix);
// boundary column c corresponds to cells()[c] in D^(m).
class TreeBoundary {
 public:
  TreeBoundary(const RootedTree& t, const Eigen::VectorXd& beta, int m, int n);

  int m() const { return m_; }
  int n() const { return n_; }
  const RootedTree& tree() const { return *t_; }
  std::size_t interior_size() const { return k_; }
  const std::vector<Vertex>& cells() const { return cells_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  const Eigen::MatrixXd& hat_green() const { return hat_g_; }
  const Eigen::VectorXd& eta() const { return eta_; }
  const Eigen::VectorXd& psi() const { return psi_; }
  // chi_m by linear solves, |T^(n)| x |D^(m)|.
  const Eigen::MatrixXd& chi() const { return chi_; }
  const BoundaryGraph& boundary_graph() const { return bg_; }

  // chi_k for any 0 <= k <= n (columns indexed by D^(k) in BFS order).
  Eigen::MatrixXd chi_depth(int k) const;
  // W~_{B,T} Ghat W~_{T,B}, diagonal included.
  Eigen::MatrixXd w_check() const;
  // Rhs of the chi_m column for cell c: eta on T_x intersect D^(n), else 0.
  Eigen::VectorXd chi_rhs(std::size_t c) const;

  // Hitting ratio f(i,j) = (psi(j)/psi(i)) Ghat(i,j)/Ghat(j,j).
  double f(Vertex i, Vertex j) const;

 private:
  const RootedTree* t_;
  int m_, n_;
  std::size_t k_;
  std::vector<Vertex> cells_;
  Eigen::VectorXd beta_;
  BoundaryGraph bg_;
  Eigen::MatrixXd hat_g_;
  Eigen::VectorXd eta_, psi_;
  Eigen::MatrixXd chi_;
};

Eigen::MatrixXd chi_solve(const RootedTree& t, const Eigen::VectorXd& beta, int m, int n);

struct ChiClosed {
  Eigen::MatrixXd chi;
  std::size_t fallbacks = 0;  // entries taken from the linear solve (psi ~ 0)
};
ChiClosed chi_closed(const TreeBoundary& tb);
ChiClosed chi_closed(const RootedTree& t, const Eigen::VectorXd& beta, int m, int n);

Eigen::MatrixXd check_matrix(const TreeBoundary& tb);
Eigen::MatrixXd check_matrix(const RootedTree& t, const Eigen::VectorXd& beta, int m, int n);
Eigen::MatrixXd check_green(const Eigen::VectorXd& rho, const Eigen::MatrixXd& c);

// rho_b = beta_b - W_check_bb / 2 and back.
Eigen::VectorXd rho_from_boundary_beta(const TreeBoundary& tb, const Eigen::VectorXd& beta_boundary);
Eigen::VectorXd boundary_beta_from_rho(const TreeBoundary& tb, const Eigen::VectorXd& rho);

// G_m^(n) on interior followed by boundary, assembled from Ghat, chi_m and
// the boundary block (2 rho - C)^{-1}.
Eigen::MatrixXd g_m_n_matrix(const TreeBoundary& tb, const Eigen::VectorXd& rho);
double g_m_n(const RootedTree& t, const Eigen::VectorXd& beta, const Eigen::VectorXd& rho, int m, int n, Vertex i,
             Vertex j);

struct HarmonicMeasureTable {
  Eigen::MatrixXd mu;  // rows: i in T^(row_depth), cols: x in T^(cap)
  int row_depth = 0;
  int cap = 0;
  double operator()(Vertex i, Vertex x) const {
    return mu(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(x));
  }
};

using HittingRatio = std::function<double(Vertex, Vertex)>;
HarmonicMeasureTable harmonic_measure_table(const RootedTree& t, const HittingRatio& f, int row_depth, int cap);

// Exit measure of Omega_x under the B_m representation from the root.
double exit_measure_rep(const TreeBoundary& tb, const Eigen::VectorXd& rho, Vertex x);
double exit_measure_rep(const RootedTree& t, const Eigen::VectorXd& beta, const Eigen::VectorXd& rho, int m, int n,
                        Vertex x);

}  // namespace vrjp

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <stdexcept>
#include <vector>

#include "vrjp/graph.hpp"

namespace vrjp {

class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(std::size_t pivot, double value);
  std::size_t pivot() const { return pivot_; }
  double value() const { return value_; }

 private:
  std::size_t pivot_;
  double value_;
};

// H_beta = 2 beta - W, self-weights included.
class HOperator {
 public:
  HOperator(const WeightedGraph& g, Eigen::VectorXd beta);
  std::size_t size() const { return g_->size(); }
  const WeightedGraph& graph() const { return *g_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
  Eigen::MatrixXd dense() const;
  Eigen::SparseMatrix<double> sparse() const;

 private:
  const WeightedGraph* g_;
  Eigen::VectorXd beta_;
};

HOperator h_beta(const WeightedGraph& g, const Eigen::VectorXd& beta);
// (H_beta) restricted to the vertex list vn (rows/cols in that order).
Eigen::MatrixXd h_restricted(const WeightedGraph& g, const Eigen::VectorXd& beta, const std::vector<Vertex>& vn);

enum class GreenKind { Full, Restricted, Boundary };

struct GreenMatrix {
  Eigen::MatrixXd values;
  GreenKind kind = GreenKind::Full;
  double operator()(Eigen::Index i, Eigen::Index j) const { return values(i, j); }
  Eigen::Index size() const { return values.rows(); }
};

// Inverse of a symmetric positive definite matrix through Cholesky; throws
// NotPositiveDefinite with the first failing pivot otherwise.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& h);
GreenMatrix green(const HOperator& h);
GreenMatrix green(const Eigen::MatrixXd& h, GreenKind kind = GreenKind::Full);

double f_ratio(const GreenMatrix& g, Vertex i, Vertex j);

// Inverse of H restricted to vn, zero-extended to all of g's vertices.
GreenMatrix hat_green_restricted(const WeightedGraph& g, const Eigen::VectorXd& beta, const std::vector<Vertex>& vn);

// psi = Ghat eta on vn (entries in vn order).
Eigen::VectorXd psi_restricted(const WeightedGraph& g, const Eigen::VectorXd& beta, const std::vector<Vertex>& vn,
                               const Eigen::VectorXd& eta);
Eigen::VectorXd psi_restricted(const WeightedGraph& g, const Eigen::VectorXd& beta, const std::vector<Vertex>& vn);

// Largest |2 beta_i psi_i - sum_{j in vn} W_ij psi_j - eta_i| over vn: the
// residual of H psi on vn when psi is extended by 1 outside.
double psi_residual(const WeightedGraph& g, const Eigen::VectorXd& beta, const std::vector<Vertex>& vn,
                    const Eigen::VectorXd& eta, const Eigen::VectorXd& psi);

class PathBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PathSumConfig {
  enum class Method { DepthFirst, Transfer };
  std::size_t max_length = 12;
  Method method = Method::DepthFirst;
  std::size_t node_budget = 20'000'000;  // depth-first only
  double prune_below = 1e-16;             // depth-first only
};

// Sum over walks from i to j of length <= L of W_sigma / (2 beta)_sigma.
// DepthFirst enumerates walks one by one; Transfer groups them by
// (length, endpoint) and sums exactly the same terms.
double path_sum_green(const WeightedGraph& g, const Eigen::VectorXd& beta, Vertex i, Vertex j,
                      const PathSumConfig& cfg);
// Walks from i that reach j only at their last step, without the last 2 beta_j.
double path_sum_F(const WeightedGraph& g, const Eigen::VectorXd& beta, Vertex i, Vertex j, const PathSumConfig& cfg);

// Schur complement of H onto the complement of U (complement in increasing order).
Eigen::MatrixXd schur(const Eigen::MatrixXd& h, const std::vector<Vertex>& U);
std::vector<Vertex> complement(std::size_t n, const std::vector<Vertex>& U);

double harmonic_residual(const Eigen::MatrixXd& h, const Eigen::VectorXd& f, const std::vector<Vertex>& U);
double harmonic_residual(const HOperator& h, const Eigen::VectorXd& f, const std::vector<Vertex>& U);

}  // namespace vrjp

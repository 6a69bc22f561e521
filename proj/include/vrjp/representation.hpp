#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "vrjp/graph.hpp"
#include "vrjp/process.hpp"
#include "vrjp/random.hpp"
#include "vrjp/tree_boundary.hpp"

namespace vrjp {

enum class RepKind { WiredStandard, TreeFree, TreeBm };
std::string to_string(RepKind k);

struct Representation {
  RepKind kind = RepKind::WiredStandard;
  int m = 0;
  Vertex i0 = 0;
  WeightedGraph graph;     // graph carrying the rates (boundary vertices included)
  RateField rates;
  Eigen::VectorXd beta;    // potentials on `graph` (empty for the free kind)
  double gamma = 0.0;      // 1 / (2 G(i0, i0)) for standard and B_m kinds
  double gamma_boundary = 0.0;  // wired kind: 1 / (2 G(delta, delta))
  Eigen::VectorXd rho;     // B_m kind
  Eigen::VectorXd A;       // free kind, indexed by child vertex (A(root) unused)
  Eigen::VectorXd green_row;  // G(i0, .) on `graph`
};

// Rates (W/2) G(i0,j)/G(i0,i) on the wired graph. Throws if the full inverse
// and the decomposition Ghat + psi psi^T / (2 gamma) disagree beyond 1e-8.
Representation standard_rep(const BoundaryGraph& bg, const Eigen::VectorXd& beta_full, Vertex i0);

// Independent A_i ~ IG(mean 1, shape W_{parent,i}); rates (W/2) A_i down, (W/2)/A_i up.
Representation free_rep(const RootedTree& t, Rng& rng);

Representation bm_rep(const TreeBoundary& tb, const Eigen::VectorXd& rho, Vertex i0);

RateField rates_from_green_row(const WeightedGraph& g, const Eigen::VectorXd& green_row);

// Worst |t_sigma - 1|, t_ij = 2 r_ij / W_ij, over the 2-cycles (i,j,i) of all
// edges and the cycles closed by each non-tree edge of a BFS spanning tree.
double cycle_consistency(const WeightedGraph& g, const RateField& r);

struct ReconstructedEnv {
  Eigen::VectorXd beta;
  double gamma = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd green_row;    // G(i0, .)
  Eigen::VectorXd hat_row;      // Ghat(i0, .) (zero off the interior)
  Eigen::VectorXd h;
  Eigen::VectorXd residual;     // (H_beta h) on the interior, zero elsewhere
  double max_residual = 0.0;
};

// Interior defaults to every vertex (then h = 0). Throws on inconsistent cycles.
ReconstructedEnv reconstruct_env(const RateField& r, double gamma, Vertex i0, const WeightedGraph& g,
                                 const std::vector<Vertex>& interior = {}, double cycle_tol = 1e-8);

// S_k = prod_{l <= k} (2 / W) r_{i_{l-1}, i_l} along the ray.
std::vector<double> s_n_statistic(const RateField& r, const std::vector<Vertex>& ray, double W);

}  // namespace vrjp

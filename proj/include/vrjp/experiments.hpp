#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "vrjp/beta_field.hpp"
#include "vrjp/graph.hpp"
#include "vrjp/stats.hpp"

namespace vrjp {

// N x |V| matrix of independent draws.
Eigen::MatrixXd sample_many(const NuParams& p, std::size_t n, std::uint64_t seed, std::size_t threads,
                            std::size_t* rejections = nullptr);

struct LaplaceRow {
  Eigen::VectorXd lambda;
  double estimate = 0.0;
  double se = 0.0;
  double closed = 0.0;
  double z = 0.0;
};

struct LaplaceResult {
  std::vector<LaplaceRow> rows;
  TestReport report;  // pass iff every |z| < z_max
};

LaplaceResult mc_laplace(const Eigen::MatrixXd& samples, const std::vector<Eigen::VectorXd>& panel,
                         const std::function<double(const Eigen::VectorXd&)>& closed, double z_max = 3.0);
// Five fixed directions: 0, e_0, 1, a ramp, and a sparse two-site vector.
std::vector<Eigen::VectorXd> default_lambda_panel(std::size_t n);

enum class MixtureDefect { None, FrozenGamma };

struct MixtureResult {
  TestReport report;  // chi-square homogeneity and TV bound combined
  TestReport chi2;
  double tv = 0.0, tv_lo = 0.0, tv_hi = 0.0;
  std::vector<std::vector<Vertex>> sequences;
  std::vector<double> vrjp_counts, mixture_counts;
};

// First-k-jump state sequences of the time-changed VRJP against the beta
// mixture of jump processes with rates (W/2) G(i0,j)/G(i0,i), beta ~ law with
// eta = 0. FrozenGamma replaces G(b,b) by 1/2 for b = the last vertex.
MixtureResult mixture_equivalence(const WeightedGraph& g, Vertex i0, std::size_t k, std::size_t n,
                                  std::uint64_t seed, std::size_t threads,
                                  MixtureDefect defect = MixtureDefect::None, double tv_max = 0.01);

TestReport xgx_identity_test(const WeightedGraph& g, const Eigen::VectorXd& eta, std::size_t n, std::uint64_t seed,
                             std::size_t threads);

struct MartinRow {
  double W = 0.0;
  int x_offset = 0;      // probe point: centre + x_offset along the first axis
  int radius = 0;        // shell of y around the centre (rounded Euclidean)
  std::size_t shell_size = 0;
  double mean_k = 0.0, ci_lo = 0.0, ci_hi = 0.0;
  double mean_abs_dev = 0.0;  // mean over replicates of the shell average of |K - 1|
};

struct MartinProbeResult {
  int L = 0;
  double W = 0.0;
  std::size_t replicates = 0;
  double seconds = 0.0;
  double factor_megabytes = 0.0;
  std::size_t rejections = 0;
  std::vector<MartinRow> rows;
};

// d = 3 wired box of side L (odd). K(x,y) = (psi(0)/psi(x)) Ghat(x,y)/Ghat(0,y).
MartinProbeResult martin_kernel_probe(int L, double W, const std::vector<int>& x_offsets, const std::vector<int>& radii,
                                      std::size_t n, std::uint64_t seed, std::size_t threads);

struct DistinguisherResult {
  TestReport report;
  double freq_small = 0.0;  // kind min(m, m')
  double freq_large = 0.0;  // kind max(m, m')
  std::size_t events = 0;
  std::size_t excluded = 0;
};

DistinguisherResult rep_distinguisher_tree(int d, double W, int m, int mprime, int n, std::size_t reps,
                                           std::uint64_t seed, std::size_t threads);

// Per-replicate identity residuals of the B_m boundary machinery on a tree
// (max-norm differences divided by the max norm of the reference).
struct TreeIdentities {
  double psi_root = 0.0;
  Eigen::VectorXd chi_root;    // chi_m(root, .) over the cells
  Eigen::VectorXd row_sum;     // chi_m row sums
  Eigen::VectorXd psi;
  Eigen::MatrixXd check;       // C check
  double res_row_sum = 0.0;    // rows of chi_m against psi
  double res_closed = 0.0;     // closed form against linear solve
  double res_gm = 0.0;         // assembled G_m against the dense inverse
  double gm_cond = 0.0;        // infinity-norm condition number of H on the boundary graph
  std::size_t fallbacks = 0;
  std::size_t nonpositive = 0; // cells with chi_m(root, cell) <= 0
};

// beta lives on T^(n); boundary potentials are drawn conditionally.
TreeIdentities tree_identities(const RootedTree& t, const Eigen::VectorXd& beta, int m, int n, Rng& rng);

// Wired-law potentials on T^(n) of a d-regular tree.
NuParams tree_wired_params(const RootedTree& t, int n);

struct SnTrend {
  int depth = 0;
  double W = 0.0;
  std::vector<std::vector<double>> free_s;      // [replicate][k - 1]
  std::vector<std::vector<double>> standard_s;  // [replicate][k - 1]
};

// S_k along the leftmost ray for the free representation and for the wired
// standard representation on T^(depth).
SnTrend sn_trend(int d, double W, int depth, std::size_t n, std::uint64_t seed, std::size_t threads);

}  // namespace vrjp

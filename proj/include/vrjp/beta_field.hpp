#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vrjp/graph.hpp"
#include "vrjp/random.hpp"

namespace vrjp {

// Parameters (W, eta) of the potential law. The graph may carry self-weights;
// its external weights are ignored here (eta plays that role).
struct NuParams {
  WeightedGraph graph;
  Eigen::VectorXd eta;

  static NuParams zero_eta(WeightedGraph g);
  void validate() const;
};

struct GigParams {
  double w = 0.0;
  double eta = 0.0;
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// True when 2*beta - W is positive definite.
bool in_domain(const WeightedGraph& g, const Eigen::VectorXd& beta);

double nu_log_density(const NuParams& p, const Eigen::VectorXd& beta);
double nu_density(const NuParams& p, const Eigen::VectorXd& beta);

// Laplace transform E[exp(-<lambda, beta>)]. Self-weights are handled by the
// shift beta_i = beta'_i + W_ii / 2, where beta' follows the law with the
// diagonal removed (the density only sees 2*beta - W).
double nu_laplace(const NuParams& p, const Eigen::VectorXd& lambda);

// Law of beta_U; vertices of U keep the order given.
NuParams marginal_params(const NuParams& p, const std::vector<Vertex>& U);

struct ConditionalParams {
  NuParams params;               // on the complement, increasing vertex order
  std::vector<Vertex> vertices;  // original ids of the complement
};
ConditionalParams conditional_params(const NuParams& p, const std::vector<Vertex>& U,
                                     const Eigen::VectorXd& beta_U);

double sample_single_site(const GigParams& g, Rng& rng);

// Breadth-first order from `sources`; remaining components follow, each from
// its smallest vertex.
std::vector<Vertex> default_order(const WeightedGraph& g, const std::vector<Vertex>& sources = {0});

struct SampleOptions {
  std::vector<Vertex> order;       // empty: default_order
  bool verify_domain = true;       // Cholesky check of the finished field
  std::size_t max_attempts = 64;
};

struct BetaSample {
  Eigen::VectorXd beta;
  std::size_t rejections = 0;
};

// Exact sequential sampler. Each vertex is drawn from its one-site marginal
// given the vertices already drawn; only the inverse of H restricted to the
// drawn vertices that still touch undrawn ones is kept (the "frontier").
BetaSample sample_nu(const NuParams& p, Rng& rng, const SampleOptions& opt = {});

// Same, with beta fixed on `fixed` (values in `fixed_beta`, same order).
BetaSample sample_nu_conditional(const NuParams& p, const std::vector<Vertex>& fixed,
                                 const Eigen::VectorXd& fixed_beta, Rng& rng,
                                 const SampleOptions& opt = {});

// Draws boundary potentials given the interior ones on the full boundary
// graph (which has eta = 0). Returns beta on interior followed by boundary.
BetaSample extend_to_boundary(const BoundaryGraph& bg, const Eigen::VectorXd& beta_interior, Rng& rng);

}  // namespace vrjp

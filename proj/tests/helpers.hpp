#pragma once

#include <Eigen/Dense>

#include "vrjp/graph.hpp"

namespace testing {

inline vrjp::WeightedGraph path(std::size_t n, double w = 1.0) {
  vrjp::WeightedGraph g(n);
  for (vrjp::Vertex i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1, w);
  return g;
}

inline vrjp::WeightedGraph cycle(std::size_t n, double w = 1.0) {
  auto g = path(n, w);
  g.add_edge(n - 1, 0, w);
  return g;
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing

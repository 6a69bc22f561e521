#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace vrjp {

using Vertex = std::size_t;
inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Neighbor {
  Vertex to;
  double w;
};

struct Edge {
  Vertex i;
  Vertex j;
  double w;
};

// Symmetric conductances with optional self-weights (diagonal) and optional
// "external" weights: conductance from a vertex to sites outside the stored
// object (used to embed finite boxes and truncated trees in their infinite
// host graph without materializing it).
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(std::size_t n);

  std::size_t size() const { return adj_.size(); }

  void add_edge(Vertex i, Vertex j, double w);
  void set_self_weight(Vertex i, double w);
  void set_external(Vertex i, double w);

  const std::vector<Neighbor>& neighbors(Vertex i) const { return adj_.at(i); }
  double weight(Vertex i, Vertex j) const;
  double self_weight(Vertex i) const { return diag_.at(i); }
  double external(Vertex i) const { return ext_.at(i); }
  // Sum of W_ij over j != i inside the graph.
  double degree_weight(Vertex i) const;
  std::size_t edge_count() const { return edges_; }
  bool has_self_weights() const;
  bool has_external() const;

  bool connected() const;
  bool connected(const std::vector<Vertex>& subset) const;

  std::vector<Edge> edges() const;
  Eigen::MatrixXd dense() const;
  static WeightedGraph from_dense(const Eigen::MatrixXd& w);

  // Graph distance (hop count) from a source; unreachable entries are -1.
  std::vector<long> hop_distance(Vertex source) const;

 private:
  void check(Vertex i) const;

  std::vector<std::vector<Neighbor>> adj_;
  std::vector<double> diag_;
  std::vector<double> ext_;
  std::size_t edges_ = 0;
};

// Box {0..L-1}^d, row-major (last coordinate fastest). External weight of a
// vertex is W times the number of lattice edges leaving the box.
WeightedGraph build_grid(int d, int L, double W);
std::vector<int> grid_coords(Vertex v, int d, int L);
Vertex grid_index(const std::vector<int>& coords, int L);

struct RootedTree {
  WeightedGraph graph;
  Vertex root = 0;
  std::vector<Vertex> parent;  // kNoVertex at the root
  std::vector<int> depth;
  std::vector<std::vector<Vertex>> children;
  std::vector<std::vector<Vertex>> generations;

  int max_depth() const { return static_cast<int>(generations.size()) - 1; }
  // T^(n), as the list of vertices of depth <= n (a prefix of the BFS order).
  std::vector<Vertex> truncation(int n) const;
  std::size_t truncation_size(int n) const;
  const std::vector<Vertex>& generation(int k) const { return generations.at(k); }
  bool in_subtree(Vertex y, Vertex x) const;
  Vertex ancestor(Vertex y, int k) const;
  std::vector<Vertex> ray(Vertex leaf) const;
};

// Vertices are numbered breadth-first from the root. Leaves at maximal depth
// carry external weight (d-1)W standing for the untruncated children.
RootedTree build_regular_tree(int d, int depth, double W);
// Relabels nothing: vertex ids of `g` must already be breadth-first from root.
RootedTree tree_from_parents(WeightedGraph g, Vertex root, const std::vector<Vertex>& parents);

Vertex tree_meet(const RootedTree& t, Vertex x, Vertex y);

// Exhaustions.
std::vector<Vertex> ball(const WeightedGraph& g, Vertex center, long radius);

struct BoundaryGraph {
  WeightedGraph interior;
  std::vector<Vertex> interior_ids;   // original vertex id of each interior index
  std::vector<Vertex> boundary_tags;  // per boundary vertex: x in D^(m), or kNoVertex when wired
  Eigen::MatrixXd boundary_weights;   // interior x boundary
  Eigen::VectorXd eta;                // total boundary weight per interior vertex

  std::size_t interior_size() const { return interior.size(); }
  std::size_t boundary_size() const { return static_cast<std::size_t>(boundary_weights.cols()); }
  // Interior followed by boundary vertices; boundary vertices are not joined to
  // each other.
  WeightedGraph full() const;
};

// Outward conductance of each vertex of `vn`: sum of W_ij over j outside vn,
// plus the vertex's external weight, accumulated in adjacency order.
Eigen::VectorXd outward_weights(const WeightedGraph& g, const std::vector<Vertex>& vn);

BoundaryGraph restrict_wired(const WeightedGraph& g, const std::vector<Vertex>& vn);
BoundaryGraph restrict_tree_bm(const RootedTree& t, int m, int n);

}  // namespace vrjp

#include "vrjp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

namespace vrjp {

WeightedGraph::WeightedGraph(std::size_t n) : adj_(n), diag_(n, 0.0), ext_(n, 0.0) {}

void WeightedGraph::check(Vertex i) const {
  if (i >= size()) throw GraphError("vertex " + std::to_string(i) + " out of range");
}

void WeightedGraph::add_edge(Vertex i, Vertex j, double w) {
  check(i);
  check(j);
  if (i == j) throw GraphError("self-loop in edge list; use set_self_weight");
  if (!(w > 0.0) || !std::isfinite(w)) throw GraphError("edge weight must be positive and finite");
  for (const auto& nb : adj_[i])
    if (nb.to == j) throw GraphError("duplicate edge " + std::to_string(i) + "-" + std::to_string(j));
  adj_[i].push_back({j, w});
  adj_[j].push_back({i, w});
  ++edges_;
}

void WeightedGraph::set_self_weight(Vertex i, double w) {
  check(i);
  if (!(w >= 0.0) || !std::isfinite(w)) throw GraphError("self-weight must be nonnegative");
  diag_[i] = w;
}

void WeightedGraph::set_external(Vertex i, double w) {
  check(i);
  if (!(w >= 0.0) || !std::isfinite(w)) throw GraphError("external weight must be nonnegative");
  ext_[i] = w;
}

double WeightedGraph::weight(Vertex i, Vertex j) const {
  check(i);
  check(j);
  if (i == j) return diag_[i];
  for (const auto& nb : adj_[i])
    if (nb.to == j) return nb.w;
  return 0.0;
}

double WeightedGraph::degree_weight(Vertex i) const {
  double s = 0.0;
  for (const auto& nb : neighbors(i)) s += nb.w;
  return s;
}

bool WeightedGraph::has_self_weights() const {
  return std::any_of(diag_.begin(), diag_.end(), [](double w) { return w != 0.0; });
}

bool WeightedGraph::has_external() const {
  return std::any_of(ext_.begin(), ext_.end(), [](double w) { return w != 0.0; });
}

bool WeightedGraph::connected(const std::vector<Vertex>& subset) const {
  if (subset.empty()) return false;
  std::vector<char> in(size(), 0), seen(size(), 0);
  for (Vertex v : subset) {
    check(v);
    in[v] = 1;
  }
  std::deque<Vertex> q{subset.front()};
  seen[subset.front()] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    Vertex v = q.front();
    q.pop_front();
    for (const auto& nb : adj_[v]) {
      if (in[nb.to] && !seen[nb.to]) {
        seen[nb.to] = 1;
        ++count;
        q.push_back(nb.to);
      }
    }
  }
  std::size_t distinct = 0;
  for (char c : in) distinct += c;
  return count == distinct;
}

bool WeightedGraph::connected() const {
  std::vector<Vertex> all(size());
  for (Vertex v = 0; v < size(); ++v) all[v] = v;
  return size() == 0 || connected(all);
}

std::vector<Edge> WeightedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edges_);
  for (Vertex i = 0; i < size(); ++i)
    for (const auto& nb : adj_[i])
      if (i < nb.to) out.push_back({i, nb.to, nb.w});
  return out;
}

Eigen::MatrixXd WeightedGraph::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Vertex i = 0; i < size(); ++i) {
    w(i, i) = diag_[i];
    for (const auto& nb : adj_[i]) w(i, nb.to) = nb.w;
  }
  return w;
}

WeightedGraph WeightedGraph::from_dense(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) throw GraphError("conductance matrix must be square");
  WeightedGraph g(static_cast<std::size_t>(w.rows()));
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    g.set_self_weight(i, w(i, i));
    for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
      if (w(i, j) != w(j, i)) throw GraphError("conductance matrix must be symmetric");
      if (w(i, j) < 0.0) throw GraphError("negative conductance");
      if (w(i, j) > 0.0) g.add_edge(i, j, w(i, j));
    }
  }
  return g;
}

std::vector<long> WeightedGraph::hop_distance(Vertex source) const {
  check(source);
  std::vector<long> dist(size(), -1);
  std::deque<Vertex> q{source};
  dist[source] = 0;
  while (!q.empty()) {
    Vertex v = q.front();
    q.pop_front();
    for (const auto& nb : adj_[v]) {
      if (dist[nb.to] < 0) {
        dist[nb.to] = dist[v] + 1;
        q.push_back(nb.to);
      }
    }
  }
  return dist;
}

std::vector<int> grid_coords(Vertex v, int d, int L) {
  std::vector<int> c(static_cast<std::size_t>(d));
  for (int k = d - 1; k >= 0; --k) {
    c[static_cast<std::size_t>(k)] = static_cast<int>(v % static_cast<Vertex>(L));
    v /= static_cast<Vertex>(L);
  }
  return c;
}

Vertex grid_index(const std::vector<int>& coords, int L) {
  Vertex v = 0;
  for (int c : coords) v = v * static_cast<Vertex>(L) + static_cast<Vertex>(c);
  return v;
}

WeightedGraph build_grid(int d, int L, double W) {
  if (d < 1 || L < 1) throw GraphError("grid needs d >= 1 and L >= 1");
  if (!(W > 0.0)) throw GraphError("grid conductance must be positive");
  double total = 1.0;
  for (int k = 0; k < d; ++k) total *= L;
  if (total > 5e7) throw GraphError("grid too large");
  const auto n = static_cast<Vertex>(total);
  WeightedGraph g(n);
  for (Vertex v = 0; v < n; ++v) {
    auto c = grid_coords(v, d, L);
    int inside = 0;
    for (int k = 0; k < d; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      if (c[kk] > 0) ++inside;
      if (c[kk] + 1 < L) {
        ++inside;
        auto c2 = c;
        ++c2[kk];
        g.add_edge(v, grid_index(c2, L), W);
      }
    }
    g.set_external(v, W * (2 * d - inside));
  }
  return g;
}

std::vector<Vertex> RootedTree::truncation(int n) const {
  std::vector<Vertex> out;
  for (int k = 0; k <= std::min(n, max_depth()); ++k)
    out.insert(out.end(), generations[static_cast<std::size_t>(k)].begin(),
               generations[static_cast<std::size_t>(k)].end());
  return out;
}

std::size_t RootedTree::truncation_size(int n) const {
  std::size_t s = 0;
  for (int k = 0; k <= std::min(n, max_depth()); ++k) s += generations[static_cast<std::size_t>(k)].size();
  return s;
}

bool RootedTree::in_subtree(Vertex y, Vertex x) const {
  if (depth.at(y) < depth.at(x)) return false;
  return ancestor(y, depth[x]) == x;
}

Vertex RootedTree::ancestor(Vertex y, int k) const {
  if (k < 0 || k > depth.at(y)) throw GraphError("ancestor generation out of range");
  while (depth[y] > k) y = parent[y];
  return y;
}

std::vector<Vertex> RootedTree::ray(Vertex leaf) const {
  std::vector<Vertex> r;
  for (Vertex v = leaf; v != kNoVertex; v = parent[v]) r.push_back(v);
  std::reverse(r.begin(), r.end());
  return r;
}

RootedTree tree_from_parents(WeightedGraph g, Vertex root, const std::vector<Vertex>& parents) {
  const std::size_t n = g.size();
  if (parents.size() != n) throw GraphError("parents array size mismatch");
  if (root != 0) throw GraphError("tree vertices must be numbered breadth-first from root 0");
  if (g.edge_count() + 1 != n) throw GraphError("tree must have |V|-1 edges");
  RootedTree t;
  t.root = root;
  t.parent = parents;
  t.depth.assign(n, 0);
  t.children.assign(n, {});
  t.parent[root] = kNoVertex;
  for (Vertex v = 1; v < n; ++v) {
    Vertex p = parents[v];
    if (p >= v) throw GraphError("tree vertices must be numbered breadth-first (parent id < child id)");
    if (g.weight(p, v) <= 0.0) throw GraphError("parent edge missing from edge list");
    t.depth[v] = t.depth[p] + 1;
    if (t.depth[v] < t.depth[v - 1]) throw GraphError("tree vertices must be numbered by generation");
    t.children[p].push_back(v);
  }
  const int maxd = n == 0 ? -1 : t.depth[n - 1];
  t.generations.assign(static_cast<std::size_t>(maxd + 1), {});
  for (Vertex v = 0; v < n; ++v) t.generations[static_cast<std::size_t>(t.depth[v])].push_back(v);
  t.graph = std::move(g);
  return t;
}

RootedTree build_regular_tree(int d, int depth, double W) {
  if (d < 2 || depth < 0) throw GraphError("regular tree needs d >= 2 and depth >= 0");
  if (!(W > 0.0)) throw GraphError("tree conductance must be positive");
  std::vector<Vertex> parents{kNoVertex};
  std::vector<int> dep{0};
  std::size_t begin = 0, end = 1;
  for (int k = 1; k <= depth; ++k) {
    for (std::size_t v = begin; v < end; ++v) {
      const int kids = (v == 0) ? d : d - 1;
      for (int c = 0; c < kids; ++c) {
        parents.push_back(v);
        dep.push_back(k);
      }
    }
    begin = end;
    end = parents.size();
    if (end > 20'000'000) throw GraphError("tree too large");
  }
  WeightedGraph g(parents.size());
  for (Vertex v = 1; v < parents.size(); ++v) g.add_edge(parents[v], v, W);
  for (Vertex v = 0; v < parents.size(); ++v)
    if (dep[v] == depth) g.set_external(v, W * (v == 0 ? d : d - 1));
  return tree_from_parents(std::move(g), 0, parents);
}

Vertex tree_meet(const RootedTree& t, Vertex x, Vertex y) {
  while (t.depth.at(x) > t.depth.at(y)) x = t.parent[x];
  while (t.depth[y] > t.depth[x]) y = t.parent[y];
  while (x != y) {
    x = t.parent[x];
    y = t.parent[y];
  }
  return x;
}

std::vector<Vertex> ball(const WeightedGraph& g, Vertex center, long radius) {
  auto dist = g.hop_distance(center);
  std::vector<Vertex> out;
  for (Vertex v = 0; v < g.size(); ++v)
    if (dist[v] >= 0 && dist[v] <= radius) out.push_back(v);
  return out;
}

Eigen::VectorXd outward_weights(const WeightedGraph& g, const std::vector<Vertex>& vn) {
  std::vector<char> in(g.size(), 0);
  for (Vertex v : vn) in.at(v) = 1;
  Eigen::VectorXd eta(static_cast<Eigen::Index>(vn.size()));
  for (std::size_t a = 0; a < vn.size(); ++a) {
    double s = 0.0;
    for (const auto& nb : g.neighbors(vn[a]))
      if (!in[nb.to]) s += nb.w;
    s += g.external(vn[a]);
    eta(static_cast<Eigen::Index>(a)) = s;
  }
  return eta;
}

namespace {

WeightedGraph induced(const WeightedGraph& g, const std::vector<Vertex>& vn) {
  std::unordered_map<Vertex, Vertex> local;
  for (std::size_t a = 0; a < vn.size(); ++a) {
    if (!local.emplace(vn[a], a).second) throw GraphError("repeated vertex in subset");
  }
  WeightedGraph h(vn.size());
  for (std::size_t a = 0; a < vn.size(); ++a) {
    h.set_self_weight(a, g.self_weight(vn[a]));
    for (const auto& nb : g.neighbors(vn[a])) {
      auto it = local.find(nb.to);
      if (it != local.end() && a < it->second) h.add_edge(a, it->second, nb.w);
    }
  }
  return h;
}

}  // namespace

WeightedGraph BoundaryGraph::full() const {
  const std::size_t k = interior.size(), nb = boundary_size();
  WeightedGraph g(k + nb);
  for (Vertex i = 0; i < k; ++i) {
    g.set_self_weight(i, interior.self_weight(i));
    for (const auto& e : interior.neighbors(i))
      if (i < e.to) g.add_edge(i, e.to, e.w);
    for (std::size_t b = 0; b < nb; ++b) {
      const double w = boundary_weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
      if (w > 0.0) g.add_edge(i, k + b, w);
    }
  }
  return g;
}

BoundaryGraph restrict_wired(const WeightedGraph& g, const std::vector<Vertex>& vn) {
  if (vn.empty()) throw GraphError("empty exhaustion set");
  if (!g.connected(vn)) throw GraphError("exhaustion set is not connected");
  BoundaryGraph bg;
  bg.interior = induced(g, vn);
  bg.interior_ids = vn;
  bg.boundary_tags = {kNoVertex};
  bg.eta = outward_weights(g, vn);
  bg.boundary_weights = bg.eta;
  return bg;
}

BoundaryGraph restrict_tree_bm(const RootedTree& t, int m, int n) {
  if (m < 0 || n < 0) throw GraphError("negative generation");
  if (m > n) throw GraphError("B_m boundary needs m <= n");
  if (n > t.max_depth()) throw GraphError("tree shallower than truncation depth");
  auto vn = t.truncation(n);
  BoundaryGraph bg;
  bg.interior = induced(t.graph, vn);
  bg.interior_ids = vn;
  bg.boundary_tags = t.generation(m);
  bg.eta = outward_weights(t.graph, vn);
  const auto k = static_cast<Eigen::Index>(vn.size());
  bg.boundary_weights = Eigen::MatrixXd::Zero(k, static_cast<Eigen::Index>(bg.boundary_tags.size()));
  const Vertex first_cell = bg.boundary_tags.front();
  for (Vertex i : t.generation(n)) {
    const Vertex x = t.ancestor(i, m);
    bg.boundary_weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(x - first_cell)) =
        bg.eta(static_cast<Eigen::Index>(i));
  }
  return bg;
}

}  // namespace vrjp

#include "vrjp/experiments.hpp"

#include <Eigen/SparseCholesky>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

#include "vrjp/green.hpp"
#include "vrjp/parallel.hpp"
#include "vrjp/process.hpp"
#include "vrjp/representation.hpp"
#include "vrjp/tree_boundary.hpp"

namespace vrjp {

namespace {
Eigen::Index ix(std::size_t v) { return static_cast<Eigen::Index>(v); }
}  // namespace

Eigen::MatrixXd sample_many(const NuParams& p, std::size_t n, std::uint64_t seed, std::size_t threads,
                            std::size_t* rejections) {
  auto draws = parallel_replicates(n, seed, threads, [&](std::size_t, Rng& rng) { return sample_nu(p, rng); });
  Eigen::MatrixXd out(ix(n), ix(p.graph.size()));
  std::size_t rej = 0;
  for (std::size_t r = 0; r < n; ++r) {
    out.row(ix(r)) = draws[r].beta.transpose();
    rej += draws[r].rejections;
  }
  if (rejections) *rejections = rej;
  return out;
}

std::vector<Eigen::VectorXd> default_lambda_panel(std::size_t n) {
  const auto k = ix(n);
  std::vector<Eigen::VectorXd> panel;
  panel.push_back(Eigen::VectorXd::Zero(k));
  panel.push_back(Eigen::VectorXd::Unit(k, 0));
  panel.push_back(Eigen::VectorXd::Constant(k, 0.5));
  Eigen::VectorXd ramp(k);
  for (Eigen::Index i = 0; i < k; ++i) ramp(i) = 0.25 * static_cast<double>(i + 1);
  panel.push_back(ramp);
  Eigen::VectorXd two = Eigen::VectorXd::Zero(k);
  two(0) = 2.0;
  two(k - 1) += 1.0;
  panel.push_back(two);
  return panel;
}

LaplaceResult mc_laplace(const Eigen::MatrixXd& samples, const std::vector<Eigen::VectorXd>& panel,
                         const std::function<double(const Eigen::VectorXd&)>& closed, double z_max) {
  LaplaceResult res;
  double worst = 0.0;
  for (const auto& lam : panel) {
    const Eigen::ArrayXd v = (-(samples * lam)).array().exp();
    LaplaceRow row;
    row.lambda = lam;
    const double n = static_cast<double>(v.size());
    row.estimate = v.mean();
    row.se = n > 1 ? std::sqrt((v - row.estimate).square().sum() / (n - 1.0) / n) : 0.0;
    row.closed = closed(lam);
    const double diff = row.estimate - row.closed;
    row.z = row.se > 0.0 ? diff / row.se : (std::abs(diff) < 1e-15 ? 0.0 : std::copysign(INFINITY, diff));
    worst = std::max(worst, std::abs(row.z));
    res.rows.push_back(row);
  }
  auto& r = res.report;
  r.name = "laplace-transform";
  r.n = static_cast<std::size_t>(samples.rows());
  r.statistic_name = "max|z|";
  r.statistic = worst;
  r.score_name = "z";
  r.score = worst;
  r.threshold = z_max;
  r.pass = worst < z_max;
  return res;
}

namespace {

std::uint64_t encode(const std::vector<Vertex>& states, std::size_t n) {
  std::uint64_t code = 0;
  for (std::size_t l = states.size(); l-- > 1;) code = code * n + states[l];
  return code;
}

// Sequential-binomial multinomial resample of a count vector.
std::vector<double> resample(const std::vector<double>& counts, Rng& rng) {
  double left = 0.0;
  for (double c : counts) left += c;
  const double total = left;
  std::vector<double> out(counts.size(), 0.0);
  auto trials = static_cast<long long>(total);
  for (std::size_t k = 0; k < counts.size() && trials > 0; ++k) {
    const double p = left > 0.0 ? std::min(1.0, counts[k] / left) : 0.0;
    const long long draw = std::binomial_distribution<long long>(trials, p)(rng);
    out[k] = static_cast<double>(draw);
    trials -= draw;
    left -= counts[k];
  }
  return out;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double na = 0.0, nb = 0.0;
  for (double x : a) na += x;
  for (double x : b) nb += x;
  double tv = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) tv += std::abs(a[k] / na - b[k] / nb);
  return 0.5 * tv;
}

}  // namespace

MixtureResult mixture_equivalence(const WeightedGraph& g, Vertex i0, std::size_t k, std::size_t n, std::uint64_t seed,
                                  std::size_t threads, MixtureDefect defect, double tv_max) {
  const std::size_t nv = g.size();
  if (i0 >= nv) throw GraphError("start vertex out of range");
  const NuParams p = NuParams::zero_eta(g);
  const Vertex b = (i0 == nv - 1) ? 0 : nv - 1;

  auto vrjp_seq = parallel_replicates(n, derive_seed(seed, "vrjp-side"), threads, [&](std::size_t, Rng& rng) {
    const auto z = time_change(simulate_vrjp(g, i0, Budget::jump_count(k), rng));
    return encode(z.states, nv);
  });
  auto mix_seq = parallel_replicates(n, derive_seed(seed, "mixture-side"), threads, [&](std::size_t, Rng& rng) {
    const Eigen::VectorXd beta = sample_nu(p, rng).beta;
    Eigen::MatrixXd gm = spd_inverse(HOperator(g, beta).dense());
    if (defect == MixtureDefect::FrozenGamma) {
      const auto rest = complement(nv, {b});
      const GreenMatrix ghat = hat_green_restricted(g, beta, rest);
      const Eigen::VectorXd f = gm.col(ix(b)) / gm(ix(b), ix(b));
      gm = ghat.values + 0.5 * f * f.transpose();
    }
    const RateField r = rates_from_green_row(g, gm.row(ix(i0)).transpose());
    return encode(simulate_mjp(r, i0, Budget::jump_count(k), rng).states, nv);
  });

  std::map<std::uint64_t, std::pair<double, double>> table;
  for (auto c : vrjp_seq) table[c].first += 1.0;
  for (auto c : mix_seq) table[c].second += 1.0;
  MixtureResult res;
  for (const auto& [code, ab] : table) {
    std::vector<Vertex> s;
    std::uint64_t c = code;
    for (std::size_t l = 0; l < k; ++l) {
      s.push_back(static_cast<Vertex>(c % nv));
      c /= nv;
    }
    res.sequences.push_back(s);
    res.vrjp_counts.push_back(ab.first);
    res.mixture_counts.push_back(ab.second);
  }
  res.chi2 = chi2_homogeneity(res.vrjp_counts, res.mixture_counts);
  res.tv = total_variation(res.vrjp_counts, res.mixture_counts);
  Rng boot(derive_seed(seed, "bootstrap"));
  std::vector<double> tvs;
  for (int rep = 0; rep < 200; ++rep)
    tvs.push_back(total_variation(resample(res.vrjp_counts, boot), resample(res.mixture_counts, boot)));
  res.tv_lo = quantile(tvs, 0.025);
  res.tv_hi = quantile(tvs, 0.975);

  res.report = res.chi2;
  res.report.name = "mixture-equivalence";
  res.report.pass = res.chi2.pass && res.tv < tv_max;
  res.report.notes.push_back("tv=" + std::to_string(res.tv) + " ci95=[" + std::to_string(res.tv_lo) + "," +
                             std::to_string(res.tv_hi) + "] tv_max=" + std::to_string(tv_max));
  return res;
}

TestReport xgx_identity_test(const WeightedGraph& g, const Eigen::VectorXd& eta, std::size_t n, std::uint64_t seed,
                             std::size_t threads) {
  const NuParams p = NuParams::zero_eta(g);
  auto lhs = parallel_replicates(n, derive_seed(seed, "xgx-beta"), threads, [&](std::size_t, Rng& rng) {
    const Eigen::VectorXd beta = sample_nu(p, rng).beta;
    Eigen::LLT<Eigen::MatrixXd> llt(HOperator(g, beta).dense());
    return eta.dot(llt.solve(eta));
  });
  const double s = eta.sum();
  auto rhs = parallel_replicates(n, derive_seed(seed, "xgx-gamma"), threads,
                                 [&](std::size_t, Rng& rng) { return s * s / (2.0 * sample_gamma_half(rng)); });
  auto r = ks_two_sample(lhs, rhs);
  r.name = "xgx-identity";
  return r;
}

MartinProbeResult martin_kernel_probe(int L, double W, const std::vector<int>& x_offsets, const std::vector<int>& radii,
                                      std::size_t n, std::uint64_t seed, std::size_t threads) {
  if (L < 3 || L % 2 == 0) throw std::invalid_argument("probe box side must be odd and >= 3");
  if (L > 41) throw std::invalid_argument("probe box side capped at 41");
  const int c = (L - 1) / 2;
  for (int x : x_offsets)
    if (x < 0 || x > c) throw std::invalid_argument("probe offset outside the box");
  const auto start = std::chrono::steady_clock::now();
  const WeightedGraph g = build_grid(3, L, W);
  NuParams p = NuParams::zero_eta(g);
  for (Vertex v = 0; v < g.size(); ++v) p.eta(ix(v)) = g.external(v);
  std::vector<Vertex> order(g.size());
  for (Vertex v = 0; v < g.size(); ++v) order[v] = v;
  const Vertex center = grid_index({c, c, c}, L);
  std::vector<int> shell(g.size());
  for (Vertex v = 0; v < g.size(); ++v) {
    const auto co = grid_coords(v, 3, L);
    double r2 = 0.0;
    for (int a : co) r2 += (a - c) * (a - c);
    shell[v] = static_cast<int>(std::lround(std::sqrt(r2)));
  }

  struct Rep {
    std::vector<double> k, dev;  // per (offset, radius)
    double mb = 0.0;
    std::size_t rejections = 0;
  };
  auto reps = parallel_replicates(n, seed, threads, [&](std::size_t, Rng& rng) {
    SampleOptions opt;
    opt.order = order;
    opt.verify_domain = false;
    Rep rep;
    for (;;) {
      const auto draw = sample_nu(p, rng, opt);
      rep.rejections += draw.rejections;
      Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(HOperator(g, draw.beta).sparse());
      if (llt.info() != Eigen::Success) {
        ++rep.rejections;
        continue;
      }
      rep.mb = static_cast<double>(llt.matrixL().nestedExpression().nonZeros()) * 12.0 / 1e6;
      const Eigen::VectorXd psi = llt.solve(p.eta);
      const Eigen::VectorXd g0 = llt.solve(Eigen::VectorXd::Unit(ix(g.size()), ix(center)));
      for (int xo : x_offsets) {
        const Vertex x = grid_index({c + xo, c, c}, L);
        const Eigen::VectorXd gx = xo == 0 ? g0 : llt.solve(Eigen::VectorXd::Unit(ix(g.size()), ix(x)));
        const double scale = psi(ix(center)) / psi(ix(x));
        for (int r : radii) {
          double sk = 0.0, sd = 0.0;
          std::size_t cnt = 0;
          for (Vertex y = 0; y < g.size(); ++y) {
            if (shell[y] != r) continue;
            const double kv = scale * gx(ix(y)) / g0(ix(y));
            sk += kv;
            sd += std::abs(kv - 1.0);
            ++cnt;
          }
          rep.k.push_back(cnt ? sk / static_cast<double>(cnt) : NAN);
          rep.dev.push_back(cnt ? sd / static_cast<double>(cnt) : NAN);
        }
      }
      return rep;
    }
  });

  MartinProbeResult res;
  res.L = L;
  res.W = W;
  res.replicates = n;
  std::size_t slot = 0;
  for (int xo : x_offsets) {
    for (int r : radii) {
      MartinRow row;
      row.W = W;
      row.x_offset = xo;
      row.radius = r;
      for (Vertex y = 0; y < g.size(); ++y) row.shell_size += shell[y] == r;
      std::vector<double> ks, ds;
      for (const auto& rep : reps) {
        ks.push_back(rep.k[slot]);
        ds.push_back(rep.dev[slot]);
      }
      const auto mk = mean_and_stderr(ks);
      row.mean_k = mk.mean;
      row.ci_lo = mk.mean - 1.96 * mk.se;
      row.ci_hi = mk.mean + 1.96 * mk.se;
      row.mean_abs_dev = mean_and_stderr(ds).mean;
      res.rows.push_back(row);
      ++slot;
    }
  }
  for (const auto& rep : reps) {
    res.factor_megabytes = std::max(res.factor_megabytes, rep.mb);
    res.rejections += rep.rejections;
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

DistinguisherResult rep_distinguisher_tree(int d, double W, int m, int mprime, int n, std::size_t reps,
                                           std::uint64_t seed, std::size_t threads) {
  if (m == mprime) throw std::invalid_argument("distinguisher needs m != m'");
  const int lo = std::min(m, mprime), hi = std::max(m, mprime);
  if (lo < 0 || n < hi + 2) throw std::invalid_argument("distinguisher needs n >= max(m, m') + 2");
  const RootedTree t = build_regular_tree(d, n, W);
  const auto vn = t.truncation(n);
  const BoundaryGraph wired = restrict_wired(t.graph, vn);
  const NuParams p{wired.interior, wired.eta};

  struct Out {
    std::size_t small_hits = 0, large_hits = 0, events = 0;
    bool excluded = false;
  };
  auto outs = parallel_replicates(reps, seed, threads, [&](std::size_t, Rng& rng) {
    Out o;
    const Eigen::VectorXd beta = sample_nu(p, rng).beta;
    auto count = [&](int kind, std::size_t& hits) {
      const TreeBoundary tb(t, beta, kind, n);
      if (!(tb.psi()(0) > 1e-12)) {
        o.excluded = true;
        return;
      }
      const Eigen::VectorXd full = extend_to_boundary(tb.boundary_graph(), beta, rng).beta;
      const Eigen::VectorXd rho = rho_from_boundary_beta(tb, full.tail(ix(tb.cells().size())));
      const Eigen::MatrixXd chi_hi = tb.chi_depth(hi), chi_par = tb.chi_depth(hi - 1);
      const Vertex first_hi = t.generation(hi).front(), first_par = t.generation(hi - 1).front();
      for (Vertex x : t.generation(hi)) {
        const Vertex px = t.parent[x];
        const double lhs = exit_measure_rep(tb, rho, x) / exit_measure_rep(tb, rho, px);
        const double rhs = chi_hi(0, ix(x - first_hi)) / chi_par(0, ix(px - first_par));
        if (std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs)) ++hits;
        if (kind == lo) ++o.events;
      }
    };
    count(lo, o.small_hits);
    count(hi, o.large_hits);
    return o;
  });

  DistinguisherResult res;
  std::size_t small = 0, large = 0;
  for (const auto& o : outs) {
    if (o.excluded) {
      ++res.excluded;
      continue;
    }
    small += o.small_hits;
    large += o.large_hits;
    res.events += o.events;
  }
  res.freq_small = res.events ? static_cast<double>(small) / static_cast<double>(res.events) : 0.0;
  res.freq_large = res.events ? static_cast<double>(large) / static_cast<double>(res.events) : 0.0;
  auto& r = res.report;
  r.name = "representation-distinguisher";
  r.n = res.events;
  r.statistic_name = "equality frequency (smaller m)";
  r.statistic = res.freq_small;
  r.score_name = "freq_larger_m";
  r.score = res.freq_large;
  r.threshold = 0.01;
  r.statistical = false;
  r.pass = res.events > 0 && res.freq_small >= 0.99 && res.freq_large <= 0.01;
  r.notes.push_back("excluded=" + std::to_string(res.excluded));
  return res;
}

NuParams tree_wired_params(const RootedTree& t, int n) {
  BoundaryGraph bg = restrict_wired(t.graph, t.truncation(n));
  return {std::move(bg.interior), std::move(bg.eta)};
}

namespace {
double rel_max(const Eigen::MatrixXd& diff, const Eigen::MatrixXd& ref) {
  return diff.cwiseAbs().maxCoeff() / std::max(ref.cwiseAbs().maxCoeff(), 1e-300);
}
}  // namespace

TreeIdentities tree_identities(const RootedTree& t, const Eigen::VectorXd& beta, int m, int n, Rng& rng) {
  const TreeBoundary tb(t, beta, m, n);
  TreeIdentities out;
  out.psi = tb.psi();
  out.psi_root = out.psi(0);
  out.row_sum = tb.chi().rowwise().sum();
  out.chi_root = tb.chi().row(0).transpose();
  out.res_row_sum = rel_max(out.row_sum - out.psi, out.psi);
  const ChiClosed cc = chi_closed(tb);
  out.fallbacks = cc.fallbacks;
  out.res_closed = rel_max(cc.chi - tb.chi(), tb.chi());
  for (Eigen::Index c = 0; c < out.chi_root.size(); ++c) out.nonpositive += !(out.chi_root(c) > 0.0);
  out.check = check_matrix(tb);

  const auto nb = ix(tb.cells().size());
  const Eigen::VectorXd full = extend_to_boundary(tb.boundary_graph(), beta, rng).beta;
  const Eigen::VectorXd rho = rho_from_boundary_beta(tb, full.tail(nb));
  const WeightedGraph fg = tb.boundary_graph().full();
  const Eigen::MatrixXd h = HOperator(fg, full).dense();
  const Eigen::MatrixXd dense = spd_inverse(h);
  out.res_gm = rel_max(g_m_n_matrix(tb, rho) - dense, dense);
  out.gm_cond = h.cwiseAbs().rowwise().sum().maxCoeff() * dense.cwiseAbs().rowwise().sum().maxCoeff();
  return out;
}

SnTrend sn_trend(int d, double W, int depth, std::size_t n, std::uint64_t seed, std::size_t threads) {
  if (depth < 1) throw std::invalid_argument("S_n trend needs depth >= 1");
  const RootedTree t = build_regular_tree(d, depth, W);
  const Vertex leaf = t.generation(depth).front();
  const auto ray = t.ray(leaf);
  SnTrend out;
  out.depth = depth;
  out.W = W;
  out.free_s = parallel_replicates(n, derive_seed(seed, "free"), threads, [&](std::size_t, Rng& rng) {
    return s_n_statistic(free_rep(t, rng).rates, ray, W);
  });

  // Depth-first preorder keeps the sampler frontier at most one root path long.
  std::vector<Vertex> order;
  std::vector<Vertex> stack{t.root};
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (auto it = t.children[v].rbegin(); it != t.children[v].rend(); ++it) stack.push_back(*it);
  }
  const NuParams p = tree_wired_params(t, depth);
  out.standard_s = parallel_replicates(n, derive_seed(seed, "standard"), threads, [&](std::size_t, Rng& rng) {
    SampleOptions opt;
    opt.order = order;
    opt.verify_domain = false;
    for (;;) {
      const Eigen::VectorXd beta = sample_nu(p, rng, opt).beta;
      Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(HOperator(p.graph, beta).sparse());
      if (llt.info() != Eigen::Success) continue;
      const Eigen::VectorXd g0 = llt.solve(Eigen::VectorXd::Unit(ix(p.graph.size()), 0));
      const Eigen::VectorXd psi = llt.solve(p.eta);
      // The boundary gamma is independent of the interior potentials.
      const double gamma = sample_gamma_half(rng);
      auto gfull = [&](Vertex x) { return g0(ix(x)) + psi(0) * psi(ix(x)) / (2.0 * gamma); };
      std::vector<double> s;
      for (std::size_t k = 1; k < ray.size(); ++k) s.push_back(gfull(ray[k]) / gfull(ray[0]));
      return s;
    }
  });
  return out;
}

}  // namespace vrjp

// vrjp: command-line front end for sampling, representations and verification.
#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <variant>

#include "vrjp/beta_field.hpp"
#include "vrjp/experiments.hpp"
#include "vrjp/green.hpp"
#include "vrjp/io.hpp"
#include "vrjp/parallel.hpp"
#include "vrjp/process.hpp"
#include "vrjp/representation.hpp"
#include "vrjp/suite.hpp"
#include "vrjp/tree_boundary.hpp"

using namespace vrjp;

namespace {

constexpr const char* kVersion = "0.1.0";
Eigen::Index ix(std::size_t v) { return static_cast<Eigen::Index>(v); }

// Options of one subcommand, shared between command-line flags and the JSON
// config file. Flags given on the command line win over config values.
class Options {
 public:
  using Ref = std::variant<double*, long long*, std::uint64_t*, std::string*, bool*, std::vector<double>*>;

  explicit Options(CLI::App* app) : app_(app) {
    add("seed", seed, "master seed (VRJP_SEED overrides)");
    add("threads", threads, "worker threads");
    app_->add_option("--config", config_path, "JSON config file; keys are option names");
  }

  template <class T>
  CLI::Option* add(const std::string& name, T& ref, const std::string& desc) {
    entries_.push_back({name, Ref(&ref)});
    return app_->add_option("--" + name, ref, desc)->capture_default_str();
  }
  CLI::Option* flag(const std::string& name, bool& ref, const std::string& desc) {
    entries_.push_back({name, Ref(&ref)});
    return app_->add_flag("--" + name, ref, desc);
  }

  void finalize() {
    if (!config_path.empty()) apply(read_json_file(config_path));
    if (const char* env = std::getenv("VRJP_SEED")) {
      try {
        std::size_t used = 0;
        seed = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ConfigError("VRJP_SEED must be an unsigned integer");
      }
      seed_source = "VRJP_SEED";
    }
    if (threads < 1) throw ConfigError("threads must be >= 1");
  }

  bool given(const std::string& name) const { return app_->count("--" + name) > 0 || from_config_.count(name); }

  Json resolved() const {
    Json j;
    for (const auto& [name, ref] : entries_)
      std::visit([&](auto* p) { j[name] = *p; }, ref);
    return j;
  }

  std::uint64_t seed = 1;
  long long threads = 1;
  std::string config_path;
  std::string seed_source = "option";

 private:
  void apply(const Json& cfg) {
    if (!cfg.is_object()) throw ConfigError(config_path + ": config must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
      if (it == entries_.end())
        throw ConfigError(config_path + ": unknown key '" + key + "' for command '" + app_->get_name() + "'");
      from_config_.insert(key);
      if (app_->count("--" + key) > 0) continue;
      const std::string where = config_path + ": key '" + key + "'";
      std::visit(
          [&](auto* p) {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, double>) {
              if (!value.is_number()) throw ConfigError(where + " expects a number");
            } else if constexpr (std::is_same_v<T, long long>) {
              if (!value.is_number_integer()) throw ConfigError(where + " expects an integer");
            } else if constexpr (std::is_same_v<T, std::uint64_t>) {
              if (!value.is_number_unsigned()) throw ConfigError(where + " expects an unsigned integer");
            } else if constexpr (std::is_same_v<T, std::string>) {
              if (!value.is_string()) throw ConfigError(where + " expects a string");
            } else if constexpr (std::is_same_v<T, bool>) {
              if (!value.is_boolean()) throw ConfigError(where + " expects true or false");
            } else {
              if (!value.is_array()) throw ConfigError(where + " expects an array of numbers");
              for (const auto& x : value)
                if (!x.is_number()) throw ConfigError(where + " expects an array of numbers");
            }
            *p = value.get<T>();
          },
          it->second);
    }
  }

  CLI::App* app_;
  std::vector<std::pair<std::string, Ref>> entries_;
  std::set<std::string> from_config_;
};

Json meta(const std::string& command, const Options& o, std::vector<std::string> checks = {}) {
  return {{"tool", "vrjp"},
          {"version", kVersion},
          {"command", command},
          {"seed_source", o.seed_source},
          {"float_format", "%.17g"},
          {"config", o.resolved()},
          {"checks", checks}};
}

void require(const Options& o, const std::string& name, const std::string& value) {
  if (value.empty() || !o.given(name)) throw ConfigError("missing required option --" + name);
}

std::size_t count_arg(long long v, const std::string& name) {
  if (v < 1) throw ConfigError("--" + name + " must be >= 1");
  return static_cast<std::size_t>(v);
}

Eigen::VectorXd eta_from(const std::string& spec, const WeightedGraph& g) {
  if (spec == "zero") return Eigen::VectorXd::Zero(ix(g.size()));
  if (spec == "external") {
    Eigen::VectorXd e(ix(g.size()));
    for (Vertex v = 0; v < g.size(); ++v) e(ix(v)) = g.external(v);
    return e;
  }
  Eigen::VectorXd e = load_vector(spec);
  if (static_cast<std::size_t>(e.size()) != g.size()) throw ConfigError("eta has the wrong length");
  return e;
}

void write_rates(const std::string& out, const WeightedGraph& g, const RateField& r) {
  CsvWriter csv(out, {"from", "to", "rate"});
  for (Vertex i = 0; i < g.size(); ++i)
    for (const auto& nb : g.neighbors(i)) csv.cell(i).cell(nb.to).cell(r.rate(i, nb.to)).end_row();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VRJP simulation and verification lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // sample-beta
  auto* sb = app.add_subcommand("sample-beta", "draw potentials from the law with parameters (W, eta)");
  Options sbo(sb);
  std::string sb_graph, sb_eta = "zero", sb_out = "beta.csv";
  long long sb_n = 1;
  sbo.add("graph", sb_graph, "graph JSON file");
  sbo.add("eta", sb_eta, "zero | external | file with one value per vertex");
  sbo.add("n", sb_n, "replicates");
  sbo.add("out", sb_out, "output CSV");

  // green
  auto* gr = app.add_subcommand("green", "Green function of a potential");
  Options gro(gr);
  std::string gr_graph, gr_beta, gr_out = "green.csv";
  gro.add("graph", gr_graph, "graph JSON file");
  gro.add("beta", gr_beta, "potential file (JSON array or one value per line)");
  gro.add("out", gr_out, "output CSV");

  // simulate-vrjp
  auto* sv = app.add_subcommand("simulate-vrjp", "simulate the vertex-reinforced jump process");
  Options svo(sv);
  std::string sv_graph, sv_out = "trajectory.csv";
  long long sv_start = 0, sv_jumps = 0;
  double sv_horizon = 0.0;
  bool sv_tc = false;
  svo.add("graph", sv_graph, "graph JSON file");
  svo.add("start", sv_start, "start vertex");
  svo.add("jumps", sv_jumps, "stop after this many jumps");
  svo.add("horizon", sv_horizon, "stop at this time (time-changed clock with --time-change)");
  svo.flag("time-change", sv_tc, "report the time-changed process");
  svo.add("out", sv_out, "output CSV");

  // build-rep
  auto* br = app.add_subcommand("build-rep", "sample a random rate field (representation)");
  Options bro(br);
  std::string br_kind = "wired", br_graph, br_out = "rates.csv";
  long long br_m = 1, br_n = 4, br_degree = 3, br_start = 0;
  double br_W = 1.0;
  bro.add("kind", br_kind, "wired | free | bm")->check(CLI::IsMember({"wired", "free", "bm"}));
  bro.add("graph", br_graph, "wired: host graph JSON (boundary from external weights)");
  bro.add("start", br_start, "wired: start vertex");
  bro.add("degree", br_degree, "tree kinds: degree");
  bro.add("W", br_W, "tree kinds: conductance");
  bro.add("m", br_m, "bm: boundary generation");
  bro.add("n", br_n, "tree kinds: depth");
  bro.add("out", br_out, "output CSV");

  // tree-chi
  auto* tc = app.add_subcommand("tree-chi", "harmonic decomposition identities on a regular tree");
  Options tco(tc);
  long long tc_degree = 3, tc_m = 2, tc_n = 5, tc_reps = 100;
  double tc_W = 2.0;
  std::string tc_out = "tree_chi.csv";
  tco.add("degree", tc_degree, "tree degree");
  tco.add("W", tc_W, "conductance");
  tco.add("m", tc_m, "boundary generation");
  tco.add("n", tc_n, "truncation depth");
  tco.add("reps", tc_reps, "replicates");
  tco.add("out", tc_out, "output CSV");

  // verify
  auto* vf = app.add_subcommand("verify", "run a verification suite");
  Options vfo(vf);
  std::string vf_suite = "core", vf_out = "report.json";
  double vf_scale = 1.0;
  vfo.add("suite", vf_suite, "core | tree | zd-probe | all")
      ->check(CLI::IsMember({"core", "tree", "zd-probe", "all"}));
  vfo.add("budget-scale", vf_scale, "multiplier on every sample size");
  vfo.add("out", vf_out, "report JSON");

  // experiment
  auto* ex = app.add_subcommand("experiment", "exploratory experiments");
  Options exo(ex);
  std::string ex_name, ex_out;
  long long ex_degree = 3, ex_m = 1, ex_mprime = 2, ex_n = 4, ex_reps = 100, ex_L = 21, ex_depth = 15;
  double ex_W = 1.0;
  std::vector<double> ex_panel{4.0, 8.0};
  ex->add_option("name", ex_name, "tree-reps | martin-probe | sn-trend")
      ->required()
      ->check(CLI::IsMember({"tree-reps", "martin-probe", "sn-trend"}));
  exo.add("degree", ex_degree, "tree-reps, sn-trend: tree degree");
  exo.add("W", ex_W, "tree-reps, sn-trend: conductance");
  exo.add("m", ex_m, "tree-reps: first boundary generation");
  exo.add("mprime", ex_mprime, "tree-reps: second boundary generation");
  exo.add("n", ex_n, "tree-reps: truncation depth");
  exo.add("depth", ex_depth, "sn-trend: ray length");
  exo.add("L", ex_L, "martin-probe: box side (odd)");
  exo.add("W-panel", ex_panel, "martin-probe: conductances");
  exo.add("reps", ex_reps, "replicates");
  exo.add("out", ex_out, "output CSV (default <name>.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sb->parsed()) {
      sbo.finalize();
      require(sbo, "graph", sb_graph);
      const GraphFile gf = load_graph_json(sb_graph);
      const NuParams p{gf.graph, eta_from(sb_eta, gf.graph)};
      p.validate();
      std::size_t rej = 0;
      const auto s = sample_many(p, count_arg(sb_n, "n"), sbo.seed, static_cast<std::size_t>(sbo.threads), &rej);
      CsvWriter csv(sb_out, {"replicate", "vertex", "beta"});
      for (Eigen::Index r = 0; r < s.rows(); ++r)
        for (Eigen::Index v = 0; v < s.cols(); ++v)
          csv.cell(static_cast<long long>(r)).cell(static_cast<long long>(v)).cell(s(r, v)).end_row();
      auto m = meta("sample-beta", sbo);
      m["rejections"] = rej;
      write_sidecar(sb_out, m);
      return 0;
    }
    if (gr->parsed()) {
      gro.finalize();
      require(gro, "graph", gr_graph);
      require(gro, "beta", gr_beta);
      const GraphFile gf = load_graph_json(gr_graph);
      const Eigen::VectorXd beta = load_vector(gr_beta);
      if (static_cast<std::size_t>(beta.size()) != gf.graph.size()) throw ConfigError("beta has the wrong length");
      GreenMatrix g;
      try {
        g = green(HOperator(gf.graph, beta));
      } catch (const NotPositiveDefinite& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
      }
      CsvWriter csv(gr_out, {"i", "j", "G"});
      for (Eigen::Index i = 0; i < g.size(); ++i)
        for (Eigen::Index j = 0; j < g.size(); ++j)
          csv.cell(static_cast<long long>(i)).cell(static_cast<long long>(j)).cell(g(i, j)).end_row();
      write_sidecar(gr_out, meta("green", gro));
      return 0;
    }
    if (sv->parsed()) {
      svo.finalize();
      require(svo, "graph", sv_graph);
      const GraphFile gf = load_graph_json(sv_graph);
      if (svo.given("jumps") == svo.given("horizon")) throw ConfigError("give exactly one of --jumps and --horizon");
      if (sv_start < 0 || static_cast<std::size_t>(sv_start) >= gf.graph.size())
        throw ConfigError("--start out of range");
      Budget b = svo.given("jumps") ? Budget::jump_count(count_arg(sv_jumps, "jumps"))
                                    : (sv_tc ? Budget::z_time(sv_horizon) : Budget::time(sv_horizon));
      if (!svo.given("jumps") && !(sv_horizon > 0.0)) throw ConfigError("--horizon must be positive");
      Rng rng(svo.seed);
      Trajectory t = simulate_vrjp(gf.graph, static_cast<Vertex>(sv_start), b, rng);
      if (sv_tc) t = time_change(t);
      CsvWriter csv(sv_out, {"t", "state"});
      csv.cell(0.0).cell(t.states[0]).end_row();
      for (std::size_t k = 0; k < t.jumps(); ++k) csv.cell(t.jump_times[k]).cell(t.states[k + 1]).end_row();
      auto m = meta("simulate-vrjp", svo);
      m["clock"] = sv_tc ? "time-changed" : "own";
      m["horizon"] = t.horizon;
      m["absorbed"] = t.absorbed;
      write_sidecar(sv_out, m);
      return 0;
    }
    if (br->parsed()) {
      bro.finalize();
      Rng rng(bro.seed);
      auto m = meta("build-rep", bro);
      if (br_kind == "wired") {
        require(bro, "graph", br_graph);
        const GraphFile gf = load_graph_json(br_graph);
        std::vector<Vertex> all(gf.graph.size());
        for (Vertex v = 0; v < all.size(); ++v) all[v] = v;
        const BoundaryGraph bg = restrict_wired(gf.graph, all);
        if (!(bg.eta.sum() > 0.0)) throw ConfigError("wired representation needs external weights in the graph");
        if (br_start < 0 || static_cast<std::size_t>(br_start) >= all.size())
          throw ConfigError("--start out of range");
        const Eigen::VectorXd beta = sample_nu(NuParams::zero_eta(bg.full()), rng).beta;
        const Representation rep = standard_rep(bg, beta, static_cast<Vertex>(br_start));
        write_rates(br_out, rep.graph, rep.rates);
        m["boundary_vertex"] = all.size();
        m["gamma"] = rep.gamma;
      } else {
        if (br_degree < 2 || br_n < 1) throw ConfigError("tree kinds need --degree >= 2 and --n >= 1");
        const RootedTree t = build_regular_tree(static_cast<int>(br_degree), static_cast<int>(br_n), br_W);
        if (br_kind == "free") {
          const Representation rep = free_rep(t, rng);
          write_rates(br_out, rep.graph, rep.rates);
        } else {
          if (br_m < 0 || br_m > br_n) throw ConfigError("bm needs 0 <= m <= n");
          const int mm = static_cast<int>(br_m), nn = static_cast<int>(br_n);
          const Eigen::VectorXd beta = sample_nu(tree_wired_params(t, nn), rng).beta;
          const TreeBoundary tb(t, beta, mm, nn);
          const Eigen::VectorXd full = extend_to_boundary(tb.boundary_graph(), beta, rng).beta;
          const auto nb = ix(tb.cells().size());
          const Representation rep = bm_rep(tb, rho_from_boundary_beta(tb, full.tail(nb)), t.root);
          write_rates(br_out, rep.graph, rep.rates);
          Json cells = Json::array();
          for (std::size_t c = 0; c < tb.cells().size(); ++c)
            cells.push_back({{"vertex", tb.interior_size() + c}, {"cell", tb.cells()[c]}});
          m["boundary_vertices"] = cells;
          m["gamma"] = rep.gamma;
        }
      }
      write_sidecar(br_out, m);
      return 0;
    }
    if (tc->parsed()) {
      tco.finalize();
      if (tc_degree < 2 || tc_m < 0 || tc_n < tc_m || tc_n < 1) throw ConfigError("need degree >= 2, 0 <= m <= n");
      const int mm = static_cast<int>(tc_m), nn = static_cast<int>(tc_n);
      const RootedTree t = build_regular_tree(static_cast<int>(tc_degree), nn, tc_W);
      const NuParams p = tree_wired_params(t, nn);
      const auto ids = parallel_replicates(count_arg(tc_reps, "reps"), tco.seed,
                                           static_cast<std::size_t>(tco.threads), [&](std::size_t, Rng& rng) {
                                             return tree_identities(t, sample_nu(p, rng).beta, mm, nn, rng);
                                           });
      CsvWriter csv(tc_out, {"replicate", "quantity", "a", "b", "value"});
      for (std::size_t r = 0; r < ids.size(); ++r) {
        const auto& x = ids[r];
        auto row = [&](const char* q, long long a, long long b, double v) {
          csv.cell(r).cell(std::string(q)).cell(a).cell(b).cell(v).end_row();
        };
        for (Eigen::Index i = 0; i < x.row_sum.size(); ++i) row("chi_row_sum", i, -1, x.row_sum(i));
        for (Eigen::Index i = 0; i < x.psi.size(); ++i) row("psi", i, -1, x.psi(i));
        for (Eigen::Index c = 0; c < x.chi_root.size(); ++c)
          row("chi_root", static_cast<long long>(t.generation(mm)[static_cast<std::size_t>(c)]), -1, x.chi_root(c));
        for (Eigen::Index a = 0; a < x.check.rows(); ++a)
          for (Eigen::Index b = 0; b < x.check.cols(); ++b) row("check", a, b, x.check(a, b));
        row("residual_row_sum", -1, -1, x.res_row_sum);
        row("residual_closed", -1, -1, x.res_closed);
        row("residual_gm", -1, -1, x.res_gm);
      }
      auto m = meta("tree-chi", tco,
                    {"rows of chi_m sum to psi", "chi_m closed form equals linear solve",
                     "assembled G_m equals the dense inverse"});
      m["residual_definition"] = "max-norm difference over max-norm of the reference";
      m["columns"] = "a, b: vertex or check-matrix indices; -1 when unused";
      write_sidecar(tc_out, m);
      return 0;
    }
    if (vf->parsed()) {
      vfo.finalize();
      if (!(vf_scale > 0.0)) throw ConfigError("--budget-scale must be positive");
      SuiteOptions so{vfo.seed, static_cast<std::size_t>(vfo.threads), vf_scale};
      const auto blocks = run_suite(vf_suite, so);
      Json report = meta("verify", vfo);
      std::vector<std::string> checks;
      for (const auto& b : blocks)
        for (const auto& r : b.reports) checks.push_back(r.identity);
      report["checks"] = checks;
      report["suite"] = vf_suite;
      report["pass"] = suite_passed(blocks);
      report["blocks"] = blocks_to_json(blocks);
      write_json_file(vf_out, report);
      for (const auto& b : blocks)
        std::cout << (b.pass ? "PASS " : "FAIL ") << (b.gating ? "" : "(exploratory) ") << b.key << " ["
                  << b.seconds << " s]\n";
      return suite_passed(blocks) ? 0 : 1;
    }
    if (ex->parsed()) {
      exo.finalize();
      const std::string out = ex_out.empty() ? ex_name + ".csv" : ex_out;
      const auto threads = static_cast<std::size_t>(exo.threads);
      auto m = meta("experiment " + ex_name, exo);
      if (ex_name == "tree-reps") {
        const auto res = rep_distinguisher_tree(static_cast<int>(ex_degree), ex_W, static_cast<int>(ex_m),
                                                static_cast<int>(ex_mprime), static_cast<int>(ex_n),
                                                count_arg(ex_reps, "reps"), exo.seed, threads);
        CsvWriter csv(out, {"kind_m", "equality_frequency", "events", "excluded"});
        csv.cell(std::min(ex_m, ex_mprime)).cell(res.freq_small).cell(res.events).cell(res.excluded).end_row();
        csv.cell(std::max(ex_m, ex_mprime)).cell(res.freq_large).cell(res.events).cell(res.excluded).end_row();
        m["report"] = report_to_json(res.report);
      } else if (ex_name == "martin-probe") {
        if (ex_L < 3 || ex_L % 2 == 0) throw ConfigError("--L must be odd and >= 3");
        const int L = static_cast<int>(ex_L), c = (L - 1) / 2;
        std::vector<int> radii;
        for (int r = 1; r <= c; ++r) radii.push_back(r);
        CsvWriter csv(out, {"W", "x_offset", "radius", "shell_size", "mean_k", "ci_lo", "ci_hi", "mean_abs_dev"});
        Json runs = Json::array();
        for (double W : ex_panel) {
          const auto res = martin_kernel_probe(L, W, {0, 1, 2}, radii, count_arg(ex_reps, "reps"),
                                               derive_seed(exo.seed, format_double(W)), threads);
          for (const auto& r : res.rows)
            csv.cell(r.W).cell(r.x_offset).cell(r.radius).cell(r.shell_size).cell(r.mean_k).cell(r.ci_lo)
                .cell(r.ci_hi).cell(r.mean_abs_dev).end_row();
          runs.push_back({{"W", W}, {"seconds", res.seconds}, {"factor_megabytes", res.factor_megabytes},
                          {"rejections", res.rejections}});
        }
        m["runs"] = runs;
      } else {
        const auto res = sn_trend(static_cast<int>(ex_degree), ex_W, static_cast<int>(ex_depth),
                                  count_arg(ex_reps, "reps"), exo.seed, threads);
        CsvWriter csv(out, {"replicate", "kind", "k", "S"});
        auto dump = [&](const char* kind, const std::vector<std::vector<double>>& s) {
          for (std::size_t r = 0; r < s.size(); ++r)
            for (std::size_t k = 0; k < s[r].size(); ++k)
              csv.cell(r).cell(std::string(kind)).cell(k + 1).cell(s[r][k]).end_row();
        };
        dump("free", res.free_s);
        dump("standard", res.standard_s);
      }
      write_sidecar(out, m);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const GraphError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

// Python bindings. Graphs are passed as dense symmetric conductance matrices
// (diagonal = self-weights).
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vrjp/beta_field.hpp"
#include "vrjp/experiments.hpp"
#include "vrjp/green.hpp"
#include "vrjp/io.hpp"
#include "vrjp/process.hpp"
#include "vrjp/representation.hpp"
#include "vrjp/stats.hpp"
#include "vrjp/suite.hpp"

namespace py = pybind11;
using namespace vrjp;

namespace {

NuParams params(const Eigen::MatrixXd& w, std::optional<Eigen::VectorXd> eta) {
  NuParams p = NuParams::zero_eta(WeightedGraph::from_dense(w));
  if (eta) p.eta = *eta;
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_vrjp, m) {
  m.doc() = "VRJP simulation and verification lab";

  py::register_exception<GraphError>(m, "GraphError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception<NotPositiveDefinite>(m, "NotPositiveDefinite", PyExc_ArithmeticError);

  m.def(
      "sample_beta",
      [](const Eigen::MatrixXd& w, std::optional<Eigen::VectorXd> eta, std::size_t n, std::uint64_t seed,
         std::size_t threads) {
        const NuParams p = params(w, std::move(eta));
        py::gil_scoped_release nogil;
        return sample_many(p, n, seed, threads);
      },
      py::arg("W"), py::arg("eta") = py::none(), py::arg("n") = 1, py::arg("seed") = 0, py::arg("threads") = 1,
      "n x |V| array of potentials");

  m.def(
      "density",
      [](const Eigen::MatrixXd& w, const Eigen::VectorXd& beta, std::optional<Eigen::VectorXd> eta) {
        return nu_density(params(w, std::move(eta)), beta);
      },
      py::arg("W"), py::arg("beta"), py::arg("eta") = py::none());

  m.def(
      "laplace",
      [](const Eigen::MatrixXd& w, const Eigen::VectorXd& lambda, std::optional<Eigen::VectorXd> eta) {
        return nu_laplace(params(w, std::move(eta)), lambda);
      },
      py::arg("W"), py::arg("lam"), py::arg("eta") = py::none(), "closed-form E[exp(-<lam, beta>)]");

  m.def(
      "green",
      [](const Eigen::MatrixXd& w, const Eigen::VectorXd& beta) {
        const WeightedGraph g = WeightedGraph::from_dense(w);
        return spd_inverse(HOperator(g, beta).dense());
      },
      py::arg("W"), py::arg("beta"), "inverse of 2 beta - W");

  m.def(
      "simulate_vrjp",
      [](const Eigen::MatrixXd& w, Vertex start, std::optional<std::size_t> jumps, std::optional<double> horizon,
         bool time_changed, std::uint64_t seed) {
        if (jumps.has_value() == horizon.has_value()) throw py::value_error("give exactly one of jumps, horizon");
        const WeightedGraph g = WeightedGraph::from_dense(w);
        const Budget b = jumps ? Budget::jump_count(*jumps)
                               : (time_changed ? Budget::z_time(*horizon) : Budget::time(*horizon));
        Rng rng(seed);
        Trajectory t = simulate_vrjp(g, start, b, rng);
        if (time_changed) t = time_change(t);
        return py::make_tuple(t.jump_times, t.states, t.local_time);
      },
      py::arg("W"), py::arg("start") = 0, py::arg("jumps") = py::none(), py::arg("horizon") = py::none(),
      py::arg("time_changed") = false, py::arg("seed") = 0, "(jump_times, states, local_time)");

  m.def(
      "standard_rep_rates",
      [](const Eigen::MatrixXd& w, const Eigen::VectorXd& external, Vertex i0, std::uint64_t seed) {
        WeightedGraph host = WeightedGraph::from_dense(w);
        for (Vertex v = 0; v < host.size(); ++v) host.set_external(v, external(static_cast<Eigen::Index>(v)));
        std::vector<Vertex> all(host.size());
        for (Vertex v = 0; v < all.size(); ++v) all[v] = v;
        const BoundaryGraph bg = restrict_wired(host, all);
        Rng rng(seed);
        const Eigen::VectorXd beta = sample_nu(NuParams::zero_eta(bg.full()), rng).beta;
        const Representation rep = standard_rep(bg, beta, i0);
        const auto n = static_cast<Eigen::Index>(rep.graph.size());
        Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
        for (Vertex i = 0; i < rep.graph.size(); ++i)
          for (const auto& [j, rate] : rep.rates.out(i)) r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rate;
        return py::make_tuple(r, beta, rep.gamma);
      },
      py::arg("W"), py::arg("external"), py::arg("i0") = 0, py::arg("seed") = 0,
      "(rates, beta, gamma) of the wired standard representation; the last index is the boundary vertex");

  m.def(
      "tree_identities",
      [](int degree, double W, int m_, int n, std::uint64_t seed) {
        const RootedTree t = build_regular_tree(degree, n, W);
        Rng rng(seed);
        const auto x = tree_identities(t, sample_nu(tree_wired_params(t, n), rng).beta, m_, n, rng);
        py::dict d;
        d["psi"] = x.psi;
        d["chi_row_sum"] = x.row_sum;
        d["chi_root"] = x.chi_root;
        d["check"] = x.check;
        d["residual_row_sum"] = x.res_row_sum;
        d["residual_closed"] = x.res_closed;
        d["residual_gm"] = x.res_gm;
        return d;
      },
      py::arg("degree"), py::arg("W"), py::arg("m"), py::arg("n"), py::arg("seed") = 0);

  m.def(
      "ks_test",
      [](std::vector<double> sample, const std::function<double(double)>& cdf) {
        const auto r = ks_test(std::move(sample), cdf);
        return py::make_tuple(r.statistic, r.score);
      },
      py::arg("sample"), py::arg("cdf"), "(D, p)");

  m.def("gamma_half_cdf", &gamma_half_cdf);

  m.def(
      "verify",
      [](const std::string& suite, std::uint64_t seed, double budget_scale, std::size_t threads) {
        std::vector<BlockResult> blocks;
        {
          py::gil_scoped_release nogil;
          blocks = run_suite(suite, SuiteOptions{seed, threads, budget_scale});
        }
        return py::make_tuple(suite_passed(blocks), blocks_to_json(blocks).dump());
      },
      py::arg("suite"), py::arg("seed") = 20240601, py::arg("budget_scale") = 1.0, py::arg("threads") = 1,
      "(passed, report JSON string)");
}

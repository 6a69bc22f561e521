// Runs every verification block and prints one line per acceptance criterion.
#include <CLI11.hpp>
#include <iomanip>
#include <iostream>
#include <map>

#include "vrjp/io.hpp"
#include "vrjp/suite.hpp"

using namespace vrjp;

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  SuiteOptions opt;
  std::string report;
  std::size_t threads = 1;
  app.add_option("--seed", opt.seed, "master seed");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--budget-scale", opt.budget_scale, "sample-size multiplier (1 = full)");
  app.add_option("--report", report, "write the full JSON report here");
  CLI11_PARSE(app, argc, argv);
  opt.threads = threads;

  std::map<int, std::vector<BlockResult>> by_criterion;
  for (const auto& key : suite_blocks("all")) {
    auto b = run_block(key, opt);
    std::cerr << "  [" << std::fixed << std::setprecision(1) << b.seconds << " s] " << key
              << (b.attempts > 1 ? " (rerun)" : "") << '\n';
    by_criterion[b.criterion].push_back(std::move(b));
  }

  bool all = true;
  for (auto& [id, blocks] : by_criterion) {
    if (id == 0) continue;  // trend reports outside the numbered criteria
    bool pass = true, gating = false;
    std::string title, detail;
    for (const auto& b : blocks) {
      gating = gating || b.gating;
      pass = pass && b.pass;
      title += (title.empty() ? "" : " + ") + b.title;
      for (const auto& r : b.reports) {
        if (r.exploratory && b.gating) continue;
        std::ostringstream os;
        os << r.name << ' ' << std::setprecision(4);
        if (b.gating)
          os << r.score_name << '=' << r.score << (r.pass ? "" : "!");
        else
          os << r.statistic_name << '=' << r.statistic;
        detail += (detail.empty() ? "" : "; ") + os.str();
      }
    }
    const char* verdict = gating ? (pass ? "PASS" : "FAIL") : "INFO";
    if (gating && !pass) all = false;
    std::cout << "criterion " << std::setw(2) << id << ' ' << verdict << "  " << title << "  [" << detail << "]\n";
  }
  for (const auto& b : by_criterion[0])
    for (const auto& r : b.reports)
      std::cout << "trend        " << r.name << ": " << r.statistic_name << '=' << r.statistic << ", "
                << r.score_name << '=' << r.score << '\n';

  if (!report.empty()) {
    std::vector<BlockResult> flat;
    for (auto& [id, blocks] : by_criterion) flat.insert(flat.end(), blocks.begin(), blocks.end());
    Json j;
    j["seed"] = opt.seed;
    j["budget_scale"] = opt.budget_scale;
    j["pass"] = all;
    j["blocks"] = blocks_to_json(flat);
    write_json_file(report, j);
  }
  std::cout << (all ? "ALL GATING CRITERIA PASS" : "SOME GATING CRITERIA FAIL") << '\n';
  return all ? 0 : 1;
}

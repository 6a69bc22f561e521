#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vrjp/stats.hpp"

namespace vrjp {

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  std::size_t threads = 1;
  // Multiplies every sample size (floored at a small minimum). 1 = full budget.
  double budget_scale = 1.0;
};

// One verification block. A block passes when every non-exploratory report
// passes; a failed block containing a statistical report is rerun once with a
// fresh sub-seed and the rerun is final.
struct BlockResult {
  std::string key;
  int criterion = 0;
  std::string title;
  bool gating = true;
  bool pass = false;
  int attempts = 1;
  std::uint64_t seed = 0;
  double seconds = 0.0;
  std::vector<TestReport> reports;
};

// Block keys, in run order.
std::vector<std::string> suite_blocks(const std::string& suite);  // core | tree | zd-probe | all
BlockResult run_block(const std::string& key, const SuiteOptions& opt);
std::vector<BlockResult> run_suite(const std::string& suite, const SuiteOptions& opt);
bool suite_passed(const std::vector<BlockResult>& blocks);

}  // namespace vrjp

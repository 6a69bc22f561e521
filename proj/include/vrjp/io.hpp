#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vrjp/graph.hpp"
#include "vrjp/suite.hpp"

namespace vrjp {

using Json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every float written to CSV uses printf "%.17g", which round-trips doubles.
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double x);
  CsvWriter& cell(std::size_t x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  void end_row();

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t pending_ = 0;
};

// RFC-4180 quoting: fields containing a comma, quote or line break are quoted
// and embedded quotes doubled.
std::string csv_escape(const std::string& s);

struct GraphFile {
  WeightedGraph graph;
  std::optional<RootedTree> tree;
};

// {"vertices": n, "edges": [[i, j, w], ...], "external": [..]?,
//  "tree": {"root": 0, "parents": [...]}?}. Self-loops are rejected.
GraphFile parse_graph_json(const Json& j);
GraphFile load_graph_json(const std::string& path);
Json graph_to_json(const WeightedGraph& g, const RootedTree* tree = nullptr);

// Parses a JSON file; syntax errors carry line and column.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// Reads a vector from a JSON array file or a one-value-per-line text file.
Eigen::VectorXd load_vector(const std::string& path);

Json report_to_json(const TestReport& r);
Json blocks_to_json(const std::vector<BlockResult>& blocks);

// Sidecar written next to a CSV artifact: <csv>.json with the resolved config.
void write_sidecar(const std::string& csv_path, const Json& meta);

}  // namespace vrjp

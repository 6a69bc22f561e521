#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "helpers.hpp"
#include "vrjp/io.hpp"

using namespace vrjp;

namespace {
std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("vrjp_test_" + name)).string();
}
std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("float formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789}) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("CSV quoting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  const auto path = temp_path("quote.csv");
  {
    CsvWriter w(path, {"name", "value"});
    w.cell(std::string("x,y")).cell(0.25).end_row();
    w.cell(std::string("z"));
    CHECK_THROWS_AS(w.end_row(), std::logic_error);
    w.cell(std::size_t{3}).end_row();
  }
  CHECK(slurp(path) == "name,value\n\"x,y\",0.25\nz,3\n");
  std::remove(path.c_str());
}

TEST_CASE("graph JSON") {
  const Json j = Json::parse(R"({"vertices": 3, "edges": [[0,1,1.5],[1,2,2]], "tree": {"root": 0, "parents": [-1,0,1]}})");
  const auto gf = parse_graph_json(j);
  CHECK(gf.graph.weight(0, 1) == 1.5);
  REQUIRE(gf.tree.has_value());
  CHECK(gf.tree->depth[2] == 2);
  const auto back = parse_graph_json(graph_to_json(gf.graph, &*gf.tree));
  CHECK(testing::max_abs(back.graph.dense() - gf.graph.dense()) == 0.0);

  CHECK_THROWS_AS(parse_graph_json(Json::parse(R"({"vertices": 2, "edges": [[1,1,1]]})")), ConfigError);
  CHECK_THROWS_AS(parse_graph_json(Json::parse(R"({"vertices": 2, "edges": [], "colour": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_graph_json(Json::parse(R"({"vertices": 2, "edges": [[0,1]]})")), ConfigError);
  const auto ext = parse_graph_json(Json::parse(R"({"vertices": 2, "edges": [[0,1,1]], "external": [1, 0.5]})"));
  CHECK(ext.graph.external(1) == 0.5);
}

TEST_CASE("JSON syntax errors carry a position") {
  const auto path = temp_path("bad.json");
  {
    std::ofstream out(path);
    out << "{\n  \"a\": 1,\n  \"b\": ]\n}\n";
  }
  try {
    read_json_file(path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("vectors from files") {
  const auto a = temp_path("v.json"), b = temp_path("v.txt");
  {
    std::ofstream(a) << "[1, 2.5, 3]";
    std::ofstream(b) << "1\n2.5\n\n3\n";
  }
  CHECK(load_vector(a) == Eigen::Vector3d(1, 2.5, 3));
  CHECK(load_vector(b) == Eigen::Vector3d(1, 2.5, 3));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("report serialisation") {
  TestReport r;
  r.name = "x";
  r.statistic = INFINITY;
  r.pass = true;
  const Json j = report_to_json(r);
  CHECK(j["name"] == "x");
  CHECK(j["statistic"] == "inf");
  CHECK(j["pass"] == true);
  BlockResult b;
  b.key = "k";
  b.reports = {r};
  const Json arr = blocks_to_json({b});
  CHECK(arr[0]["reports"][0]["name"] == "x");
}

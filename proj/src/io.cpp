#include "vrjp/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace vrjp {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (pending_ > 0) out_ << ',';
  out_ << csv_escape(s);
  ++pending_;
  return *this;
}

CsvWriter& CsvWriter::cell(double x) { return cell(format_double(x)); }
CsvWriter& CsvWriter::cell(std::size_t x) { return cell(std::to_string(x)); }
CsvWriter& CsvWriter::cell(long long x) { return cell(std::to_string(x)); }

void CsvWriter::end_row() {
  if (pending_ != columns_) throw std::logic_error("CSV row has the wrong number of fields");
  out_ << '\n';
  pending_ = 0;
  if (!out_) throw std::runtime_error("CSV write failed");
}

GraphFile parse_graph_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("graph: expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "vertices" && key != "edges" && key != "external" && key != "tree")
      throw ConfigError("graph: unknown key '" + key + "'");
  if (!j.contains("vertices") || !j["vertices"].is_number_unsigned())
    throw ConfigError("graph: 'vertices' must be a non-negative integer");
  const auto n = j["vertices"].get<std::size_t>();
  GraphFile gf{WeightedGraph(n), std::nullopt};
  if (!j.contains("edges") || !j["edges"].is_array()) throw ConfigError("graph: 'edges' must be an array");
  std::size_t k = 0;
  for (const auto& e : j["edges"]) {
    const std::string where = "graph: edges[" + std::to_string(k++) + "]";
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned() ||
        !e[2].is_number())
      throw ConfigError(where + ": expected [i, j, w]");
    const auto a = e[0].get<std::size_t>(), b = e[1].get<std::size_t>();
    if (a == b) throw ConfigError(where + ": self-loops are not allowed");
    try {
      gf.graph.add_edge(a, b, e[2].get<double>());
    } catch (const GraphError& err) {
      throw ConfigError(where + ": " + err.what());
    }
  }
  if (j.contains("external")) {
    const auto& ext = j["external"];
    if (!ext.is_array() || ext.size() != n) throw ConfigError("graph: 'external' must have one entry per vertex");
    for (std::size_t v = 0; v < n; ++v) {
      if (!ext[v].is_number() || ext[v].get<double>() < 0.0)
        throw ConfigError("graph: external[" + std::to_string(v) + "] must be a non-negative number");
      gf.graph.set_external(v, ext[v].get<double>());
    }
  }
  if (j.contains("tree")) {
    const auto& t = j["tree"];
    if (!t.is_object() || !t.contains("root") || !t.contains("parents") || !t["parents"].is_array())
      throw ConfigError("graph: 'tree' needs 'root' and 'parents'");
    std::vector<Vertex> parents;
    for (const auto& p : t["parents"]) parents.push_back(p.is_number_integer() && p.get<long long>() >= 0
                                                             ? p.get<Vertex>()
                                                             : kNoVertex);
    try {
      gf.tree = tree_from_parents(gf.graph, t["root"].get<Vertex>(), parents);
    } catch (const GraphError& err) {
      throw ConfigError(std::string("graph: tree: ") + err.what());
    }
  }
  return gf;
}

GraphFile load_graph_json(const std::string& path) { return parse_graph_json(read_json_file(path)); }

Json graph_to_json(const WeightedGraph& g, const RootedTree* tree) {
  Json j;
  j["vertices"] = g.size();
  j["edges"] = Json::array();
  for (const auto& e : g.edges()) j["edges"].push_back({e.i, e.j, e.w});
  if (g.has_external()) {
    j["external"] = Json::array();
    for (Vertex v = 0; v < g.size(); ++v) j["external"].push_back(g.external(v));
  }
  if (tree) {
    Json p = Json::array();
    for (Vertex v = 0; v < g.size(); ++v) p.push_back(v == tree->root ? Json(-1) : Json(tree->parent[v]));
    j["tree"] = {{"root", tree->root}, {"parents", p}};
  }
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Translate the byte offset into a line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON");
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

Eigen::VectorXd load_vector(const std::string& path) {
  std::vector<double> v;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  if (in.peek() == '[') {
    const Json j = read_json_file(path);
    for (const auto& x : j) {
      if (!x.is_number()) throw ConfigError(path + ": expected an array of numbers");
      v.push_back(x.get<double>());
    }
  } else {
    std::string line;
    std::size_t k = 0;
    while (std::getline(in, line)) {
      ++k;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        v.push_back(std::stod(line));
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(k) + ": not a number");
      }
    }
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

namespace {
Json num(double x) { return std::isfinite(x) ? Json(x) : Json(format_double(x)); }
}  // namespace

Json report_to_json(const TestReport& r) {
  return {{"name", r.name},
          {"identity", r.identity},
          {"n", r.n},
          {"statistic_name", r.statistic_name},
          {"statistic", num(r.statistic)},
          {"score_name", r.score_name},
          {"score", num(r.score)},
          {"threshold", num(r.threshold)},
          {"pass", r.pass},
          {"exploratory", r.exploratory},
          {"statistical", r.statistical},
          {"notes", r.notes}};
}

Json blocks_to_json(const std::vector<BlockResult>& blocks) {
  Json arr = Json::array();
  for (const auto& b : blocks) {
    Json reports = Json::array();
    for (const auto& r : b.reports) reports.push_back(report_to_json(r));
    arr.push_back({{"block", b.key},
                   {"criterion", b.criterion},
                   {"title", b.title},
                   {"gating", b.gating},
                   {"pass", b.pass},
                   {"attempts", b.attempts},
                   {"seed", b.seed},
                   {"seconds", b.seconds},
                   {"reports", reports}});
  }
  return arr;
}

void write_sidecar(const std::string& csv_path, const Json& meta) { write_json_file(csv_path + ".json", meta); }

}  // namespace vrjp

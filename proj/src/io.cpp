#include "sorw/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "sorw/error.hpp"

namespace sorw {

GraphFormat parse_graph_format(const std::string& name) {
  if (name == "edge-list" || name == "edgelist") return GraphFormat::edge_list;
  if (name == "matrix-market" || name == "mtx") return GraphFormat::matrix_market;
  throw PreconditionError("unknown graph format '" + name + "' (edge-list | matrix-market)");
}

Graph load_graph(const std::string& path, GraphFormat format, bool undirected) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    if (format == GraphFormat::matrix_market) {
      Graph g = load_matrix_market(in);
      if (undirected && !g.undirected()) {
        // A general header with --undirected: symmetrise.
        std::vector<Edge> edges;
        for (const Edge& e : g.edges()) {
          if (e.source < e.target || !g.has_edge(e.target, e.source)) {
            edges.push_back(e);
            edges.push_back({e.target, e.source});
          }
        }
        return Graph(g.num_nodes(), std::move(edges), true, g.labels());
      }
      return g;
    }
    return load_edge_list(in, EdgeListOptions{undirected});
  } catch (const ParseError& e) {
    throw e.with_prefix(path + ": ");
  }
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out_ << ',';
    const std::string& f = fields[k];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      out_ << f;
      continue;
    }
    out_ << '"';
    for (char c : f) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  }
  out_ << '\n';
}

std::vector<TensorEntry> load_tensor(std::istream& in, const Graph& g) {
  std::unordered_map<std::string, NodeId> id;
  for (NodeId v = 0; v < g.num_nodes(); ++v) id.emplace(g.label(v), v);
  auto lookup = [&](const std::string& s, std::size_t line) {
    auto it = id.find(s);
    if (it == id.end()) throw ParseError("unknown node label '" + s + "'", line);
    return it->second;
  };
  std::vector<TensorEntry> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#' || text[first] == '%') continue;
    std::istringstream ss(text);
    std::string a, b, c, extra;
    double p;
    if (!(ss >> a >> b >> c >> p) || (ss >> extra))
      throw ParseError("expected 'i j k probability'", line);
    if (!std::isfinite(p) || p < 0.0) throw ParseError("probability must be finite and nonnegative", line);
    out.push_back({lookup(a, line), lookup(b, line), lookup(c, line), p});
  }
  return out;
}

std::vector<TensorEntry> load_tensor_file(const std::string& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return load_tensor(in, g);
  } catch (const ParseError& e) {
    throw e.with_prefix(path + ": ");
  }
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
    }
}

void write_vector_market(std::ostream& out, const Vector& v) {
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  char buf[32];
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", v(k));
    out << buf << '\n';
  }
}

std::string node_order_json(const Graph& g) {
  nlohmann::json j;
  j["states"] = "nodes";
  j["order"] = g.labels();
  return j.dump(2);
}

std::string edge_order_json(const Graph& g) {
  nlohmann::json j;
  j["states"] = "edges";
  auto order = nlohmann::json::array();
  for (const Edge& e : g.edges()) order.push_back({g.label(e.source), g.label(e.target)});
  j["order"] = std::move(order);
  return j.dump(2);
}

}  // namespace sorw

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sorw/chain.hpp"

namespace sorw {

enum class GraphFormat { edge_list, matrix_market };

GraphFormat parse_graph_format(const std::string& name);

// Opens and parses a graph file. Parse errors carry the file name.
Graph load_graph(const std::string& path, GraphFormat format, bool undirected);

// 12 significant digits; "inf" / "-inf" / "nan" for non-finite values.
std::string format_real(double x);

// Minimal CSV writer. Fields containing separators or quotes are quoted.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

// Lines "i j k p" with node labels; '#' and '%' start comments.
std::vector<TensorEntry> load_tensor(std::istream& in, const Graph& g);
std::vector<TensorEntry> load_tensor_file(const std::string& path, const Graph& g);

// Coordinate real, general symmetry, 1-based indices.
void write_matrix_market(std::ostream& out, const SparseMatrix& m);
void write_vector_market(std::ostream& out, const Vector& v);

// Describes state ordering: node labels for a node chain, (source, target)
// label pairs for an edge chain.
std::string node_order_json(const Graph& g);
std::string edge_order_json(const Graph& g);

}  // namespace sorw

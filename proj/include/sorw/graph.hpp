#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace sorw {

using NodeId = std::size_t;
using EdgeId = std::size_t;

struct Edge {
  NodeId source;
  NodeId target;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Finite directed graph with dense node ids and a stable edge order.
// Undirected graphs are stored as symmetric directed edge sets. Immutable
// after construction.
class Graph {
 public:
  Graph() = default;
  // Validates endpoints, rejects self-loops and duplicates, and checks
  // symmetry when `undirected` is set. Missing labels default to "0".."n-1".
  Graph(std::size_t num_nodes, std::vector<Edge> edges, bool undirected = false,
        std::vector<std::string> labels = {});

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  // Number of undirected edges when the graph is undirected, otherwise the
  // number of directed edges.
  std::size_t num_reported_edges() const noexcept {
    return undirected_ ? edges_.size() / 2 : edges_.size();
  }
  bool undirected() const noexcept { return undirected_; }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const EdgeId> out_edges(NodeId i) const {
    return {out_index_.data() + out_offset_[i], out_index_.data() + out_offset_[i + 1]};
  }
  std::span<const EdgeId> in_edges(NodeId i) const {
    return {in_index_.data() + in_offset_[i], in_index_.data() + in_offset_[i + 1]};
  }
  std::size_t out_degree(NodeId i) const { return out_offset_[i + 1] - out_offset_[i]; }
  std::size_t in_degree(NodeId i) const { return in_offset_[i + 1] - in_offset_[i]; }

  std::optional<EdgeId> find_edge(NodeId i, NodeId j) const;
  bool has_edge(NodeId i, NodeId j) const { return find_edge(i, j).has_value(); }

  const std::string& label(NodeId i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::size_t num_nodes_ = 0;
  bool undirected_ = false;
  std::vector<Edge> edges_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> out_offset_{0}, in_offset_{0};
  std::vector<EdgeId> out_index_, in_index_;
  std::unordered_map<std::uint64_t, EdgeId> lookup_;
};

using GraphPtr = std::shared_ptr<const Graph>;

struct EdgeListOptions {
  bool undirected = false;
  // A line whose first non-blank character is one of these is ignored.
  std::string comment_prefixes = "#%";
};

// Two whitespace separated labels per line. Labels are mapped to dense ids in
// order of first appearance; duplicate edges are dropped.
Graph load_edge_list(std::istream& in, const EdgeListOptions& options = {});

// Matrix Market coordinate adjacency. `symmetric` headers produce undirected
// graphs; values of real/integer matrices are ignored except for zeros.
Graph load_matrix_market(std::istream& in);

struct StripResult {
  Graph graph;
  // old_to_new[i] is the id of node i in `graph`, or nullopt when removed.
  std::vector<std::optional<NodeId>> old_to_new;
  // Removed node ids in removal order.
  std::vector<NodeId> removed;
};

// Repeatedly removes nodes of degree <= 1 from an undirected graph.
StripResult strip_leaves(const Graph& g);

struct LineEdge {
  EdgeId from;
  EdgeId to;
  // ter(to) == sou(from): the pair is a backtracking step.
  bool backtracking;
};

// Directed line graph: one line edge (e, f) for every pair with ter(e) = sou(f).
struct LineGraphMap {
  std::vector<LineEdge> edges;
  std::size_t num_backtracking() const;
};

LineGraphMap line_graph(const Graph& g);

// Line graph with the backtracking pairs removed, as a Graph on |E| nodes.
Graph hashimoto_graph(const Graph& g);

// Edges (i, j) whose target has (j, i) as its only out-edge.
std::vector<EdgeId> dangling_edges(const Graph& g);

// Strongly connected components, each sorted ascending, ordered by smallest member.
std::vector<std::vector<NodeId>> strongly_connected_components(const Graph& g);
bool is_strongly_connected(const Graph& g);

// Longest shortest path over ordered node pairs. Throws PreconditionError
// when some pair is not connected.
std::size_t diameter(const Graph& g);

}  // namespace sorw

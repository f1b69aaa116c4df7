#include "sorw/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <cctype>
#include <sstream>
#include <unordered_set>
#include <string_view>

#include "sorw/detail/scc.hpp"
#include "sorw/error.hpp"

namespace sorw {

namespace {

std::uint64_t edge_key(NodeId i, NodeId j) {
  return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
}

bool is_comment(std::string_view line, std::string_view prefixes) {
  const auto pos = line.find_first_not_of(" \t\r");
  if (pos == std::string_view::npos) return true;  // blank
  return prefixes.find(line[pos]) != std::string_view::npos;
}

// Collects labelled edges, assigning dense ids by first appearance.
class EdgeCollector {
 public:
  explicit EdgeCollector(bool undirected) : undirected_(undirected) {}

  NodeId node(const std::string& label) {
    auto [it, inserted] = ids_.try_emplace(label, labels_.size());
    if (inserted) labels_.push_back(label);
    return it->second;
  }

  void add(NodeId u, NodeId v, std::size_t line) {
    if (u == v) throw ParseError("self-loop on node '" + labels_[u] + "'", line);
    insert(u, v);
    if (undirected_) insert(v, u);
  }

  Graph build() && {
    const std::size_t n = labels_.size();
    return Graph(n, std::move(edges_), undirected_, std::move(labels_));
  }

  void reserve_nodes(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) node(std::to_string(i + 1));
  }

 private:
  void insert(NodeId u, NodeId v) {
    if (seen_.insert(edge_key(u, v)).second) edges_.push_back({u, v});
  }

  bool undirected_;
  std::unordered_map<std::string, NodeId> ids_;
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::unordered_set<std::uint64_t> seen_;
};

}  // namespace

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges, bool undirected,
             std::vector<std::string> labels)
    : num_nodes_(num_nodes), undirected_(undirected), edges_(std::move(edges)),
      labels_(std::move(labels)) {
  if (num_nodes_ > std::numeric_limits<std::uint32_t>::max())
    throw PreconditionError("graph too large");
  if (labels_.empty()) {
    labels_.reserve(num_nodes_);
    for (std::size_t i = 0; i < num_nodes_; ++i) labels_.push_back(std::to_string(i));
  }
  if (labels_.size() != num_nodes_) throw PreconditionError("label count does not match node count");

  std::vector<std::size_t> out_count(num_nodes_ + 1, 0), in_count(num_nodes_ + 1, 0);
  lookup_.reserve(edges_.size());
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const auto [s, t] = edges_[e];
    if (s >= num_nodes_ || t >= num_nodes_)
      throw PreconditionError("edge " + std::to_string(e) + " has an endpoint outside [0, n)");
    if (s == t) throw PreconditionError("self-loop at node " + labels_[s]);
    if (!lookup_.emplace(edge_key(s, t), e).second)
      throw PreconditionError("duplicate edge (" + labels_[s] + ", " + labels_[t] + ")");
    ++out_count[s + 1];
    ++in_count[t + 1];
  }
  if (undirected_) {
    for (const auto& [s, t] : edges_) {
      if (!lookup_.contains(edge_key(t, s)))
        throw PreconditionError("undirected graph is missing edge (" + labels_[t] + ", " +
                                labels_[s] + ")");
    }
  }
  for (std::size_t i = 0; i < num_nodes_; ++i) {
    out_count[i + 1] += out_count[i];
    in_count[i + 1] += in_count[i];
  }
  out_offset_ = out_count;
  in_offset_ = in_count;
  out_index_.resize(edges_.size());
  in_index_.resize(edges_.size());
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    out_index_[out_count[edges_[e].source]++] = e;
    in_index_[in_count[edges_[e].target]++] = e;
  }
}

std::optional<EdgeId> Graph::find_edge(NodeId i, NodeId j) const {
  if (auto it = lookup_.find(edge_key(i, j)); it != lookup_.end()) return it->second;
  return std::nullopt;
}

Graph load_edge_list(std::istream& in, const EdgeListOptions& options) {
  EdgeCollector collector(options.undirected);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment(line, options.comment_prefixes)) continue;
    std::istringstream tokens(line);
    std::string a, b, extra;
    if (!(tokens >> a >> b) || (tokens >> extra))
      throw ParseError("expected exactly two node labels", line_no);
    const NodeId u = collector.node(a);
    const NodeId v = collector.node(b);
    collector.add(u, v, line_no);
  }
  if (in.bad()) throw ParseError("read error");
  return std::move(collector).build();
}

Graph load_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty Matrix Market input", 1);
  ++line_no;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate")
    throw ParseError("expected a '%%MatrixMarket matrix coordinate' header", line_no);
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "pattern" && field != "real" && field != "integer")
    throw ParseError("unsupported Matrix Market field '" + field + "'", line_no);
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError("unsupported Matrix Market symmetry '" + symmetry + "'", line_no);
  const bool symmetric = symmetry == "symmetric";

  std::size_t rows = 0, cols = 0, nnz = 0;
  bool have_size = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment(line, "%")) continue;
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> nnz)) throw ParseError("malformed size line", line_no);
    have_size = true;
    break;
  }
  if (!have_size) throw ParseError("missing size line", line_no);
  if (rows != cols) throw ParseError("adjacency matrix must be square", line_no);

  EdgeCollector collector(symmetric);
  collector.reserve_nodes(rows);
  std::size_t entries = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment(line, "%")) continue;
    std::istringstream entry(line);
    std::size_t r = 0, c = 0;
    if (!(entry >> r >> c)) throw ParseError("malformed entry", line_no);
    if (r < 1 || r > rows || c < 1 || c > cols) throw ParseError("index out of range", line_no);
    ++entries;
    if (field != "pattern") {
      double value = 0.0;
      if (!(entry >> value)) throw ParseError("missing value", line_no);
      if (value == 0.0) continue;
    }
    collector.add(r - 1, c - 1, line_no);
  }
  if (entries != nnz)
    throw ParseError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(entries),
                     line_no);
  return std::move(collector).build();
}

StripResult strip_leaves(const Graph& g) {
  if (!g.undirected()) throw PreconditionError("strip_leaves requires an undirected graph");
  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> degree(n);
  std::vector<bool> removed(n, false);
  std::deque<NodeId> queue;
  for (NodeId i = 0; i < n; ++i) {
    degree[i] = g.out_degree(i);
    if (degree[i] <= 1) queue.push_back(i);
  }
  StripResult result;
  while (!queue.empty()) {
    const NodeId i = queue.front();
    queue.pop_front();
    if (removed[i]) continue;
    removed[i] = true;
    result.removed.push_back(i);
    for (EdgeId e : g.out_edges(i)) {
      const NodeId j = g.edge(e).target;
      if (removed[j]) continue;
      if (--degree[j] == 1) queue.push_back(j);
    }
  }
  result.old_to_new.assign(n, std::nullopt);
  std::vector<std::string> labels;
  for (NodeId i = 0; i < n; ++i) {
    if (removed[i]) continue;
    result.old_to_new[i] = labels.size();
    labels.push_back(g.label(i));
  }
  std::vector<Edge> edges;
  for (const auto& [s, t] : g.edges()) {
    if (!removed[s] && !removed[t]) edges.push_back({*result.old_to_new[s], *result.old_to_new[t]});
  }
  const std::size_t kept = labels.size();
  result.graph = Graph(kept, std::move(edges), true, std::move(labels));
  return result;
}

std::size_t LineGraphMap::num_backtracking() const {
  return static_cast<std::size_t>(
      std::count_if(edges.begin(), edges.end(), [](const LineEdge& l) { return l.backtracking; }));
}

LineGraphMap line_graph(const Graph& g) {
  LineGraphMap map;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const auto [i, j] = g.edge(e);
    for (EdgeId f : g.out_edges(j)) {
      map.edges.push_back({e, f, g.edge(f).target == i});
    }
  }
  return map;
}

Graph hashimoto_graph(const Graph& g) {
  std::vector<Edge> edges;
  for (const LineEdge& l : line_graph(g).edges) {
    if (!l.backtracking) edges.push_back({l.from, l.to});
  }
  std::vector<std::string> labels;
  labels.reserve(g.num_edges());
  for (const auto& [s, t] : g.edges()) labels.push_back(g.label(s) + "->" + g.label(t));
  return Graph(g.num_edges(), std::move(edges), false, std::move(labels));
}

std::vector<EdgeId> dangling_edges(const Graph& g) {
  std::vector<EdgeId> result;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const auto [i, j] = g.edge(e);
    const auto out = g.out_edges(j);
    if (out.size() == 1 && g.edge(out.front()).target == i) result.push_back(e);
  }
  return result;
}

std::vector<std::vector<NodeId>> strongly_connected_components(const Graph& g) {
  return detail::tarjan_scc(g.num_nodes(), [&](std::size_t v, auto&& visit) {
    for (EdgeId e : g.out_edges(v)) visit(g.edge(e).target);
  });
}

bool is_strongly_connected(const Graph& g) {
  return strongly_connected_components(g).size() <= 1;
}

std::size_t diameter(const Graph& g) {
  const std::size_t n = g.num_nodes();
  constexpr std::size_t unreached = static_cast<std::size_t>(-1);
  std::size_t best = 0;
  std::vector<std::size_t> dist(n);
  std::vector<NodeId> frontier;
  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), unreached);
    dist[s] = 0;
    frontier.assign(1, s);
    std::size_t reached = 1;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const NodeId v = frontier[head];
      for (EdgeId e : g.out_edges(v)) {
        const NodeId w = g.edge(e).target;
        if (dist[w] != unreached) continue;
        dist[w] = dist[v] + 1;
        best = std::max(best, dist[w]);
        frontier.push_back(w);
        ++reached;
      }
    }
    if (reached != n)
      throw PreconditionError("diameter undefined: graph is not strongly connected");
  }
  return best;
}

}  // namespace sorw

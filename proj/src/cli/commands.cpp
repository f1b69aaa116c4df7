#include "sorw/cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sorw/error.hpp"
#include "sorw/first_order.hpp"
#include "sorw/graph.hpp"

namespace sorw::cli {

namespace {

using json = nlohmann::json;
using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

// Malformed option values; reported with exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json real(double x) {
  if (std::isfinite(x)) return x;
  return format_real(x);
}

json summary_json(const GraphSummary& s) {
  json j{{"nodes", s.nodes}, {"edges", s.edges}, {"diameter", nullptr}};
  if (s.diameter) j["diameter"] = *s.diameter;
  return j;
}

GraphSummary summarize(const Graph& g) {
  GraphSummary s{g.num_nodes(), g.num_reported_edges(), std::nullopt};
  try {
    s.diameter = diameter(g);
  } catch (const PreconditionError&) {
  }
  return s;
}

NodeId node_by_label(const Graph& g, const std::string& label) {
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (g.label(v) == label) return v;
  throw UsageError("no node labelled '" + label + "'");
}

std::vector<NodeId> nodes_by_labels(const Graph& g, const std::string& list) {
  std::vector<NodeId> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(node_by_label(g, item));
  if (out.empty()) throw UsageError("empty node set");
  return out;
}

std::string component_summary(const std::vector<std::vector<std::size_t>>& comps) {
  std::ostringstream s;
  s << comps.size() << " strongly connected classes of sizes";
  for (std::size_t c = 0; c < comps.size() && c < 10; ++c) s << (c ? ", " : " ") << comps[c].size();
  if (comps.size() > 10) s << ", ...";
  return s.str();
}

std::string fmt(double x) { return format_real(x); }

}  // namespace

WalkSpec parse_walk(const std::string& text) {
  WalkSpec w;
  if (text == "uniform") {
    w.kind = WalkSpec::Kind::uniform;
  } else if (text == "nb") {
    w.kind = WalkSpec::Kind::nonbacktracking;
  } else if (text.rfind("dw:", 0) == 0) {
    w.kind = WalkSpec::Kind::downweighted;
    std::size_t used = 0;
    try {
      w.alpha = std::stod(text.substr(3), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - 3) throw UsageError("bad alpha in --walk " + text);
    if (!(w.alpha >= 0.0 && w.alpha <= 1.0)) throw UsageError("alpha must lie in [0, 1]");
  } else if (text.rfind("tensor:", 0) == 0 && text.size() > 7) {
    w.kind = WalkSpec::Kind::tensor;
    w.tensor_path = text.substr(7);
  } else {
    throw UsageError("--walk must be uniform, nb, dw:<alpha> or tensor:<path>");
  }
  return w;
}

std::string walk_name(const WalkSpec& walk) {
  switch (walk.kind) {
    case WalkSpec::Kind::uniform: return "uniform";
    case WalkSpec::Kind::nonbacktracking: return "nb";
    case WalkSpec::Kind::downweighted: return "dw:" + fmt(walk.alpha);
    case WalkSpec::Kind::tensor: return "tensor:" + walk.tensor_path;
  }
  return "";
}

EdgeChain make_chain(const GraphPtr& g, const WalkSpec& walk) {
  switch (walk.kind) {
    case WalkSpec::Kind::uniform: return uniform_edge_chain(g);
    case WalkSpec::Kind::nonbacktracking: return nonbacktracking_edge_chain(g);
    case WalkSpec::Kind::downweighted: return downweighted_edge_chain(g, walk.alpha);
    case WalkSpec::Kind::tensor: {
      const auto entries = load_tensor_file(walk.tensor_path, *g);
      return edge_chain_from_tensor(g, entries);
    }
  }
  throw UsageError("unknown walk");
}

std::vector<double> parse_alpha_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double a = 0.0;
    try {
      a = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw UsageError("bad value '" + item + "' in --alpha-grid");
    if (!(a >= 0.0 && a <= 1.0)) throw UsageError("--alpha-grid values must lie in [0, 1]");
    out.push_back(a);
  }
  if (out.empty()) throw UsageError("--alpha-grid is empty");
  return out;
}

InfoReport info_report(const Graph& g) {
  InfoReport r;
  r.before = summarize(g);
  r.after = summarize(strip_leaves(g).graph);
  return r;
}

std::string format_info(const InfoReport& r) {
  auto one = [](const GraphSummary& s) {
    return std::to_string(s.nodes) + " " + std::to_string(s.edges) + " " +
           (s.diameter ? std::to_string(*s.diameter) : std::string("inf"));
  };
  return one(r.before) + " | " + one(r.after);
}

std::string ordering_name(Ordering o) {
  switch (o) {
    case Ordering::second_order_below: return "second-order below classical for every target";
    case Ordering::second_order_above: return "second-order above classical for every target";
    case Ordering::equal: return "second-order equal to classical for every target";
    case Ordering::mixed: return "mixed";
  }
  return "";
}

Ordering ordering_of(const Vector& m_so, const Vector& m_classical) {
  bool below = true, above = true, equal = true;
  for (Index j = 0; j < m_so.size(); ++j) {
    below = below && m_so(j) < m_classical(j);
    above = above && m_so(j) > m_classical(j);
    equal = equal && m_so(j) == m_classical(j);
  }
  if (equal) return Ordering::equal;
  if (below) return Ordering::second_order_below;
  if (above) return Ordering::second_order_above;
  return Ordering::mixed;
}

HittingTable hitting_table(const EdgeChain& chain) {
  const PullbackData data = build_pullback(chain);
  HittingTable t;
  t.second_order = so_hitting_matrix_columns(chain, data.first);
  t.classical = hitting_matrix(data.chain.transition(), *data.chain.stationary()).T;
  t.m_second_order = t.second_order.colwise().mean().transpose();
  t.m_classical = t.classical.colwise().mean().transpose();
  t.ordering = ordering_of(t.m_second_order, t.m_classical);
  return t;
}

RandomTargetReport access_table(const EdgeChain& chain) {
  const PullbackData data = build_pullback(chain);
  const Matrix T = so_hitting_matrix_columns(chain, data.first);
  return so_random_target(chain, data, &T);
}

AlphaSweep alpha_sweep(const GraphPtr& g, const std::vector<double>& alphas) {
  auto column_sums = [&](double alpha) -> Vector {
    const EdgeChain chain = downweighted_edge_chain(g, alpha);
    const PullbackData data = build_pullback(chain);
    return so_hitting_matrix_columns(chain, data.first).colwise().sum().transpose();
  };
  const Vector base = column_sums(1.0);
  AlphaSweep s{alphas, Matrix(idx(alphas.size()), base.size())};
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const Vector sums = alphas[a] == 1.0 ? base : column_sums(alphas[a]);
    s.ratio.row(idx(a)) = sums.cwiseQuotient(base).transpose();
  }
  return s;
}

std::vector<Check> validate(const EdgeChain& chain, const ValidateOptions& opt) {
  const Graph& g = chain.graph();
  const Index n = idx(g.num_nodes());
  std::vector<Check> checks;
  auto run = [&](const std::string& name, auto body) {
    Check c{name, Check::Status::pass, ""};
    try {
      body(c);
    } catch (const std::exception& e) {
      c.status = Check::Status::fail;
      c.detail = e.what();
    }
    checks.push_back(std::move(c));
  };
  auto judge = [](Check& c, bool ok, std::string detail) {
    c.status = ok ? Check::Status::pass : Check::Status::fail;
    c.detail = std::move(detail);
  };

  run("line-graph equivalence", [&](Check& c) {
    double worst = 0.0;
    bool same_support = true;
    for (NodeId k = 0; k < g.num_nodes(); ++k) {
      const Vector a = so_mean_hitting_times(chain, k).tau_edge;
      const Vector b = so_hitting_via_linegraph(chain, k);
      for (Index e = 0; e < a.size(); ++e) {
        if (std::isinf(a(e)) || std::isinf(b(e)))
          same_support = same_support && std::isinf(a(e)) && std::isinf(b(e));
        else
          worst = std::max(worst, std::abs(a(e) - b(e)));
      }
    }
    judge(c, same_support && worst <= 1e-10,
          "max |difference| " + fmt(worst) + (same_support ? "" : "; infinite entries differ"));
  });

  const IrreducibilityReport rep = check_irreducible(chain);
  if (!rep.irreducible) {
    checks.push_back({"irreducibility", Check::Status::skipped,
                      "edge chain is reducible (" + component_summary(rep.components) +
                          "); equilibrium checks skipped"});
    return checks;
  }
  checks.push_back({"irreducibility", Check::Status::pass, "edge chain is irreducible"});

  std::optional<PullbackData> data;
  run("pullback identities", [&](Check& c) {
    data = build_pullback(chain);
    SparseMatrix I(n, n);
    I.setIdentity();
    const double lr = Matrix(SparseMatrix(data->L * data->R) - I).cwiseAbs().maxCoeff();
    const Vector& pi = *data->chain.stationary();
    const double lift = (lift_density(pi, *data) - data->edge_density).cwiseAbs().maxCoeff();
    const double rows = (data->chain.transition() * Vector::Ones(n) - Vector::Ones(n)).cwiseAbs().maxCoeff();
    const double inv = stationary_residual(data->chain.transition(), pi);
    judge(c, lr <= 1e-15 && lift <= 1e-12 && rows <= 1e-12 && inv <= 1e-10,
          "|LR - I| " + fmt(lr) + ", |L^T pi - pihat| " + fmt(lift) + ", row sums " + fmt(rows) +
              ", |pi^T P - pi^T|_1 " + fmt(inv));
  });
  if (!data) return checks;
  const Vector& pi = *data->chain.stationary();
  const SparseMatrix& P = data->chain.transition();

  run("first-order Kac", [&](Check& c) {
    double worst = 0.0;
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      const ReturnData r = return_times(P, {i}, pi);
      worst = std::max(worst, std::abs(r.tau_plus(0) * pi(idx(i)) - 1.0));
    }
    judge(c, worst <= 1e-10, "max |tau_i pi_i - 1| " + fmt(worst));
  });

  run("first-order hitting matrix", [&](Check& c) {
    const HittingMatrix h = hitting_matrix(P, pi);
    judge(c, true, "Kemeny " + fmt(h.kemeny) + ", spread " + fmt(h.spread) + ", residual " + fmt(h.residual));
  });

  run("second-order Kac", [&](Check& c) {
    double worst = 0.0;
    for (NodeId i = 0; i < g.num_nodes(); ++i)
      worst = std::max(worst, std::abs(so_return_time(chain, data->first, i) * pi(idx(i)) - 1.0));
    judge(c, worst <= 1e-10, "max |tau~_i pi_i - 1| " + fmt(worst));
  });

  if (g.num_edges() <= opt.dense_route_limit) {
    run("second-order hitting matrix routes", [&](Check& c) {
      const SecondOrderHittingMatrix h = so_hitting_matrix(chain, *data);
      judge(c, true, "max |difference| " + fmt(h.max_route_difference));
    });
  } else {
    checks.push_back({"second-order hitting matrix routes", Check::Status::skipped,
                      std::to_string(g.num_edges()) + " edges exceed the dense limit"});
  }

  if (opt.trials == 0) {
    checks.push_back({"monte carlo", Check::Status::skipped, "no trials requested"});
    return checks;
  }
  run("monte carlo", [&](Check& c) {
    // Return times of every node and hitting times from the first node.
    constexpr double z_limit = 4.5;
    SimulationOptions sim{opt.trials, 1'000'000, opt.seed, 0};
    double worst = 0.0;
    std::size_t censored = 0, compared = 0;
    auto compare = [&](double analytic, const WalkStats& s) {
      censored += s.censored;
      ++compared;
      const double gap = std::abs(s.mean - analytic);
      const double slack = 1e-9 * std::max(1.0, std::abs(analytic));
      if (gap <= slack) return;
      worst = std::max(worst, s.std_error > 0 ? gap / s.std_error : infinity);
    };
    for (NodeId i = 0; i < g.num_nodes(); ++i)
      compare(so_return_time(chain, data->first, i), simulate_so_return(chain, *data, i, sim));
    const auto all = simulate_so_hitting_all(chain, data->first.pprime, 0, sim);
    for (NodeId k = 1; k < g.num_nodes(); ++k) compare(so_node_hitting(chain, data->first, k)(0), all[k]);
    judge(c, censored == 0 && worst <= z_limit,
          std::to_string(compared) + " estimates, max |z| " + fmt(worst) + ", censored " +
              std::to_string(censored));
  });
  return checks;
}

namespace {

struct Config {
  std::string input;
  std::string format = "edge-list";
  bool undirected = false;
  bool strip = false;
  std::string walk = "nb";
  std::string alpha_grid = "0,0.25,0.5,0.75,1";
  std::uint64_t seed = 1;
  std::size_t trials = 100'000;
  std::size_t validate_trials = 20'000;
  std::size_t cap = 1'000'000;
  std::string out;
  std::string detail;
  bool json = false;
  std::string from, to, set;
};

struct Output {
  std::ofstream file;
  std::ostream* stream;
  Output(const std::string& path, std::ostream& fallback) : stream(&fallback) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw std::runtime_error("cannot write '" + path + "'");
    stream = &file;
  }
  std::ostream& operator*() { return *stream; }
};

GraphPtr load(const Config& cfg, std::ostream& err) {
  Graph g = load_graph(cfg.input, parse_graph_format(cfg.format), cfg.undirected);
  if (cfg.strip) {
    StripResult s = strip_leaves(g);
    err << "stripped " << s.removed.size() << " nodes\n";
    g = std::move(s.graph);
  }
  return std::make_shared<const Graph>(std::move(g));
}

int cmd_info(const Config& cfg, std::ostream& out, std::ostream&) {
  const Graph g = load_graph(cfg.input, parse_graph_format(cfg.format), cfg.undirected);
  Output o(cfg.out, out);
  if (!g.undirected()) {
    const GraphSummary s = summarize(g);
    if (cfg.json)
      *o << json{{"before", summary_json(s)}, {"after", nullptr}}.dump(2) << '\n';
    else
      *o << s.nodes << ' ' << s.edges << ' ' << (s.diameter ? std::to_string(*s.diameter) : "inf") << '\n';
    return kOk;
  }
  const InfoReport r = info_report(g);
  if (cfg.json)
    *o << json{{"before", summary_json(r.before)}, {"after", summary_json(r.after)}}.dump(2) << '\n';
  else
    *o << format_info(r) << '\n';
  return kOk;
}

int cmd_strip(const Config& cfg, std::ostream& out, std::ostream& err) {
  const Graph g = load_graph(cfg.input, parse_graph_format(cfg.format), cfg.undirected);
  const StripResult s = strip_leaves(g);
  err << "removed " << s.removed.size() << " nodes\n";
  Output o(cfg.out, out);
  for (const Edge& e : s.graph.edges())
    if (e.source < e.target) *o << s.graph.label(e.source) << ' ' << s.graph.label(e.target) << '\n';
  return kOk;
}

int cmd_hitting(const Config& cfg, std::ostream& out, std::ostream& err) {
  const GraphPtr g = load(cfg, err);
  const EdgeChain chain = make_chain(g, parse_walk(cfg.walk));
  const HittingTable t = hitting_table(chain);
  const Index n = idx(g->num_nodes());
  Output o(cfg.out, out);
  if (cfg.json) {
    json nodes = json::array();
    for (Index j = 0; j < n; ++j)
      nodes.push_back({{"node", g->label(static_cast<NodeId>(j))},
                       {"m_classical", real(t.m_classical(j))},
                       {"m_second_order", real(t.m_second_order(j))}});
    json so = json::array(), cl = json::array();
    for (Index i = 0; i < n; ++i) {
      json a = json::array(), b = json::array();
      for (Index j = 0; j < n; ++j) {
        a.push_back(real(t.second_order(i, j)));
        b.push_back(real(t.classical(i, j)));
      }
      so.push_back(std::move(a));
      cl.push_back(std::move(b));
    }
    *o << json{{"walk", cfg.walk},
               {"ordering", ordering_name(t.ordering)},
               {"targets", std::move(nodes)},
               {"second_order", std::move(so)},
               {"classical", std::move(cl)}}
              .dump(2)
       << '\n';
  } else {
    CsvWriter csv(*o);
    csv.row({"node", "m_classical", "m_second_order", "second_order_over_classical",
             "classical_over_second_order"});
    for (Index j = 0; j < n; ++j)
      csv.row({g->label(static_cast<NodeId>(j)), fmt(t.m_classical(j)), fmt(t.m_second_order(j)),
               fmt(t.m_second_order(j) / t.m_classical(j)), fmt(t.m_classical(j) / t.m_second_order(j))});
  }
  if (!cfg.detail.empty()) {
    Output d(cfg.detail, out);
    CsvWriter csv(*d);
    csv.row({"from", "to", "second_order", "classical"});
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        csv.row({g->label(static_cast<NodeId>(i)), g->label(static_cast<NodeId>(j)),
                 fmt(t.second_order(i, j)), fmt(t.classical(i, j))});
  }
  err << "ordering: " << ordering_name(t.ordering) << '\n';
  return kOk;
}

int cmd_access(const Config& cfg, std::ostream& out, std::ostream& err) {
  const GraphPtr g = load(cfg, err);
  const EdgeChain chain = make_chain(g, parse_walk(cfg.walk));
  const RandomTargetReport r = access_table(chain);
  Output o(cfg.out, out);
  if (cfg.json) {
    json nodes = json::array();
    for (NodeId i = 0; i < g->num_nodes(); ++i)
      nodes.push_back({{"node", g->label(i)}, {"access", real(r.access(idx(i)))}});
    json j{{"walk", cfg.walk},
           {"access", std::move(nodes)},
           {"mean", real(r.kappa_tilde)},
           {"spread", real(r.spread)},
           {"constant_return_condition", r.condition_holds},
           {"condition_gap", real(r.condition_gap)}};
    if (r.kappa_error) j["kappa_error"] = real(*r.kappa_error);
    *o << j.dump(2) << '\n';
  } else {
    CsvWriter csv(*o);
    csv.row({"node", "access"});
    for (NodeId i = 0; i < g->num_nodes(); ++i) csv.row({g->label(i), fmt(r.access(idx(i)))});
  }
  err << "mean " << fmt(r.kappa_tilde) << ", relative spread " << fmt(r.spread)
      << ", constant return condition " << (r.condition_holds ? "holds" : "fails") << '\n';
  return kOk;
}

int cmd_alpha_sweep(const Config& cfg, std::ostream& out, std::ostream& err) {
  const std::vector<double> grid = parse_alpha_grid(cfg.alpha_grid);
  const GraphPtr g = load(cfg, err);
  const AlphaSweep s = alpha_sweep(g, grid);
  Output o(cfg.out, out);
  if (cfg.json) {
    json rows = json::array();
    for (std::size_t a = 0; a < grid.size(); ++a) {
      json r = json::array();
      for (Index j = 0; j < s.ratio.cols(); ++j) r.push_back(real(s.ratio(idx(a), j)));
      rows.push_back({{"alpha", grid[a]}, {"ratio", std::move(r)}});
    }
    *o << json{{"nodes", g->labels()}, {"sweep", std::move(rows)}}.dump(2) << '\n';
  } else {
    CsvWriter csv(*o);
    csv.row({"alpha", "min", "mean", "max"});
    for (std::size_t a = 0; a < grid.size(); ++a) {
      const auto row = s.ratio.row(idx(a));
      csv.row({fmt(grid[a]), fmt(row.minCoeff()), fmt(row.mean()), fmt(row.maxCoeff())});
    }
  }
  if (!cfg.detail.empty()) {
    Output d(cfg.detail, out);
    CsvWriter csv(*d);
    csv.row({"alpha", "node", "ratio"});
    for (std::size_t a = 0; a < grid.size(); ++a)
      for (Index j = 0; j < s.ratio.cols(); ++j)
        csv.row({fmt(grid[a]), g->label(static_cast<NodeId>(j)), fmt(s.ratio(idx(a), j))});
  }
  return kOk;
}

int cmd_return_times(const Config& cfg, std::ostream& out, std::ostream& err) {
  const GraphPtr g = load(cfg, err);
  const EdgeChain chain = make_chain(g, parse_walk(cfg.walk));
  const PullbackData data = build_pullback(chain);
  std::vector<NodeId> all(g->num_nodes());
  for (NodeId i = 0; i < all.size(); ++i) all[i] = i;
  const SecondOrderReturn r = so_return_times(chain, data, all);
  const Vector& pi = *data.chain.stationary();
  std::optional<double> set_time;
  std::vector<NodeId> S;
  if (!cfg.set.empty()) {
    S = nodes_by_labels(*g, cfg.set);
    set_time = so_return_times(chain, data, S).tau_set;
  }
  Output o(cfg.out, out);
  if (cfg.json) {
    json nodes = json::array();
    for (NodeId i = 0; i < all.size(); ++i)
      nodes.push_back({{"node", g->label(i)},
                       {"second_order", real(r.tau(idx(i)))},
                       {"inverse_density", real(1.0 / pi(idx(i)))}});
    json j{{"walk", cfg.walk}, {"nodes", std::move(nodes)}};
    if (set_time) {
      json labels = json::array();
      for (NodeId v : S) labels.push_back(g->label(v));
      j["set"] = {{"nodes", std::move(labels)}, {"return_time", real(*set_time)}};
    }
    *o << j.dump(2) << '\n';
  } else {
    CsvWriter csv(*o);
    csv.row({"node", "second_order", "inverse_density"});
    for (NodeId i = 0; i < all.size(); ++i) csv.row({g->label(i), fmt(r.tau(idx(i))), fmt(1.0 / pi(idx(i)))});
    if (set_time) err << "set return time " << fmt(*set_time) << '\n';
  }
  return kOk;
}

int cmd_validate(const Config& cfg, std::ostream& out, std::ostream& err) {
  const GraphPtr g = load(cfg, err);
  const EdgeChain chain = make_chain(g, parse_walk(cfg.walk));
  ValidateOptions opt;
  opt.seed = cfg.seed;
  opt.trials = cfg.validate_trials;
  const std::vector<Check> checks = validate(chain, opt);
  bool failed = false;
  Output o(cfg.out, out);
  json rows = json::array();
  for (const Check& c : checks) {
    const char* status = c.status == Check::Status::pass ? "PASS" : c.status == Check::Status::fail ? "FAIL" : "SKIP";
    failed = failed || c.status == Check::Status::fail;
    if (cfg.json)
      rows.push_back({{"check", c.name}, {"status", status}, {"detail", c.detail}});
    else
      *o << status << ' ' << c.name << ": " << c.detail << '\n';
  }
  if (cfg.json) *o << json{{"walk", cfg.walk}, {"checks", std::move(rows)}, {"passed", !failed}}.dump(2) << '\n';
  return failed ? kInvariantFailure : kOk;
}

int cmd_simulate(const Config& cfg, std::ostream& out, std::ostream& err) {
  const GraphPtr g = load(cfg, err);
  const EdgeChain chain = make_chain(g, parse_walk(cfg.walk));
  const PullbackData data = build_pullback(chain);
  if (cfg.from.empty()) throw UsageError("simulate needs --from");
  const NodeId i = node_by_label(*g, cfg.from);
  const SimulationOptions sim{cfg.trials, cfg.cap, cfg.seed, 0};
  const bool is_return = cfg.to.empty();
  const NodeId k = is_return ? i : node_by_label(*g, cfg.to);
  const WalkStats s = is_return ? simulate_so_return(chain, data, i, sim)
                                : simulate_so_hitting(chain, data.first.pprime, i, k, sim);
  const double analytic =
      is_return ? so_return_time(chain, data.first, i) : so_node_hitting(chain, data.first, k)(idx(i));
  const double z = s.std_error > 0 ? (s.mean - analytic) / s.std_error : 0.0;
  Output o(cfg.out, out);
  const std::string quantity = is_return ? "return" : "hitting";
  if (cfg.json) {
    *o << json{{"quantity", quantity}, {"from", g->label(i)}, {"to", g->label(k)}, {"mean", real(s.mean)},
               {"stderr", real(s.std_error)}, {"trials", s.trials}, {"censored", s.censored},
               {"analytic", real(analytic)}, {"z", real(z)}}
              .dump(2)
       << '\n';
  } else {
    CsvWriter csv(*o);
    csv.row({"quantity", "from", "to", "mean", "stderr", "trials", "censored", "analytic", "z"});
    csv.row({quantity, g->label(i), g->label(k), fmt(s.mean), fmt(s.std_error), std::to_string(s.trials),
             std::to_string(s.censored), fmt(analytic), fmt(z)});
  }
  if (s.warning) err << "warning: " << s.censored << " walks hit the step cap and were excluded\n";
  return kOk;
}

int cmd_export(const Config& cfg, std::ostream&, std::ostream& err) {
  if (cfg.out.empty()) throw UsageError("export needs --out <directory>");
  const GraphPtr g = load(cfg, err);
  const EdgeChain chain = make_chain(g, parse_walk(cfg.walk));
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(cfg.out) / name);
    if (!f) throw std::runtime_error("cannot write '" + (fs::path(cfg.out) / name).string() + "'");
    return f;
  };
  {
    auto f = open("edge_chain.mtx");
    write_matrix_market(f, chain.transition());
    auto j = open("edge_chain.json");
    j << edge_order_json(*g) << '\n';
  }
  if (!check_irreducible(chain).irreducible) {
    err << "edge chain is reducible; densities and pullback not written\n";
    return kOk;
  }
  const PullbackData data = build_pullback(chain);
  auto f = open("node_chain.mtx");
  write_matrix_market(f, data.chain.transition());
  auto j = open("node_chain.json");
  j << node_order_json(*g) << '\n';
  auto ed = open("edge_density.mtx");
  write_vector_market(ed, data.edge_density);
  auto nd = open("node_density.mtx");
  write_vector_market(nd, *data.chain.stationary());
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hitting, return and access times of second-order random walks", "sorw"};
  app.require_subcommand(1);
  Config cfg;

  auto graph_options = [&](CLI::App* sc) {
    sc->add_option("--input", cfg.input, "Graph file")->required();
    sc->add_option("--format", cfg.format, "edge-list | matrix-market")->capture_default_str();
    sc->add_flag("--undirected", cfg.undirected, "Treat each input line as an undirected edge");
    sc->add_option("--out", cfg.out, "Output path (default: stdout)");
    sc->add_flag("--json", cfg.json, "JSON instead of CSV");
  };
  auto analysis_options = [&](CLI::App* sc, bool walk) {
    graph_options(sc);
    sc->add_flag("--strip", cfg.strip, "Remove leaves (recursively) before the analysis");
    if (walk) sc->add_option("--walk", cfg.walk, "uniform | nb | dw:<alpha> | tensor:<path>")->capture_default_str();
  };

  auto* info = app.add_subcommand("info", "Nodes, edges and diameter before and after leaf stripping");
  graph_options(info);
  auto* strip = app.add_subcommand("strip", "Write the leaf-stripped graph as an edge list");
  graph_options(strip);
  auto* hitting = app.add_subcommand("hitting", "Mean hitting times, second-order and classical");
  analysis_options(hitting, true);
  hitting->add_option("--detail", cfg.detail, "Also write every (from, to) pair here");
  auto* access = app.add_subcommand("access", "Mean access times a_i = sum_j pi_j T~(i, j)");
  analysis_options(access, true);
  auto* sweep = app.add_subcommand("alpha-sweep", "Hitting time ratios of backtrack-downweighted walks");
  analysis_options(sweep, false);
  sweep->add_option("--alpha-grid", cfg.alpha_grid, "Comma separated alphas in [0, 1]")->capture_default_str();
  sweep->add_option("--detail", cfg.detail, "Also write the per-node ratios here");
  auto* ret = app.add_subcommand("return-times", "Second-order mean return times");
  analysis_options(ret, true);
  ret->add_option("--set", cfg.set, "Comma separated node labels for a set return time");
  auto* val = app.add_subcommand("validate", "Run the invariant checks on one graph and walk");
  analysis_options(val, true);
  val->add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
  val->add_option("--trials", cfg.validate_trials, "Monte Carlo trials per estimate (0 disables)")
      ->capture_default_str();
  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of one hitting or return time");
  analysis_options(sim, true);
  sim->add_option("--from", cfg.from, "Start node label")->required();
  sim->add_option("--to", cfg.to, "Target node label (omit for the return time)");
  sim->add_option("--seed", cfg.seed, "Seed")->capture_default_str();
  sim->add_option("--trials", cfg.trials, "Number of walks")->capture_default_str();
  sim->add_option("--cap", cfg.cap, "Step cap per walk")->capture_default_str();
  auto* exp = app.add_subcommand("export", "Write P-hat, P and densities in Matrix Market format");
  analysis_options(exp, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*info) return cmd_info(cfg, out, err);
    if (*strip) return cmd_strip(cfg, out, err);
    if (*hitting) return cmd_hitting(cfg, out, err);
    if (*access) return cmd_access(cfg, out, err);
    if (*sweep) return cmd_alpha_sweep(cfg, out, err);
    if (*ret) return cmd_return_times(cfg, out, err);
    if (*val) return cmd_validate(cfg, out, err);
    if (*sim) return cmd_simulate(cfg, out, err);
    if (*exp) return cmd_export(cfg, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ReducibleChainError& e) {
    err << "error: " << e.what() << "\n  " << component_summary(e.components()) << '\n';
    return kDataError;
  } catch (const InvariantViolation& e) {
    err << "invariant failure: " << e.what() << '\n';
    return kInvariantFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace sorw::cli

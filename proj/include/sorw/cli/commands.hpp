#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sorw/chain.hpp"
#include "sorw/io.hpp"
#include "sorw/monte_carlo.hpp"
#include "sorw/pullback.hpp"
#include "sorw/second_order.hpp"

namespace sorw::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kInvariantFailure = 3 };

struct WalkSpec {
  enum class Kind { uniform, nonbacktracking, downweighted, tensor };
  Kind kind = Kind::nonbacktracking;
  double alpha = 0.0;
  std::string tensor_path;
};

// "uniform" | "nb" | "dw:<alpha>" | "tensor:<path>"
WalkSpec parse_walk(const std::string& text);
std::string walk_name(const WalkSpec& walk);
EdgeChain make_chain(const GraphPtr& g, const WalkSpec& walk);

// Comma separated reals in [0, 1].
std::vector<double> parse_alpha_grid(const std::string& text);

struct GraphSummary {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  // Empty for disconnected graphs.
  std::optional<std::size_t> diameter;
};

struct InfoReport {
  GraphSummary before;
  GraphSummary after;
};

InfoReport info_report(const Graph& g);
// "nodes edges diameter | nodes edges diameter"
std::string format_info(const InfoReport& r);

enum class Ordering { second_order_below, second_order_above, equal, mixed };
std::string ordering_name(Ordering o);
// Compares m_so against m_classical entrywise.
Ordering ordering_of(const Vector& m_so, const Vector& m_classical);

struct HittingTable {
  // T~(i, j) of the walk and T(i, j) of its pullback chain.
  Matrix second_order;
  Matrix classical;
  // Column means over the source node.
  Vector m_second_order;
  Vector m_classical;
  Ordering ordering;
};

HittingTable hitting_table(const EdgeChain& chain);

// Access times a_i = sum_j pi_j T~(i, j) and the constant-return-time
// hypothesis on each in-neighbourhood.
RandomTargetReport access_table(const EdgeChain& chain);

struct AlphaSweep {
  std::vector<double> alphas;
  // ratio(a, j) = sum_i T~^(alpha_a)(i, j) / sum_i T~^(1)(i, j).
  Matrix ratio;
};

AlphaSweep alpha_sweep(const GraphPtr& g, const std::vector<double>& alphas);

struct Check {
  std::string name;
  enum class Status { pass, fail, skipped } status;
  std::string detail;
};

struct ValidateOptions {
  std::size_t trials = 20'000;
  std::uint64_t seed = 1;
  // Above this many directed edges the dense two-route comparison is skipped.
  std::size_t dense_route_limit = 2'000;
};

std::vector<Check> validate(const EdgeChain& chain, const ValidateOptions& opt);

// Full command line entry point. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sorw::cli

#pragma once

#include <cstdint>
#include <vector>

#include "sorw/chain.hpp"
#include "sorw/pullback.hpp"

namespace sorw {

struct WalkStats {
  double mean = 0.0;
  // Sample standard deviation / sqrt(trials - censored).
  double std_error = 0.0;
  std::size_t trials = 0;
  std::size_t censored = 0;
  // Set whenever censored > 0: the mean ignores the truncated walks.
  bool warning = false;
};

struct SimulationOptions {
  std::size_t trials = 100'000;
  std::size_t cap = 1'000'000;
  std::uint64_t seed = 0;
  // Worker threads; 0 picks hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
};

// Second-order walk from X_0 = i with X_1 ~ p'_{i,.}; time to reach k.
WalkStats simulate_so_hitting(const EdgeChain& chain, const Vector& pprime, NodeId i, NodeId k,
                              const SimulationOptions& opt);

// One batch of walks from i records the first visit to every node. Entry k
// estimates the same quantity as simulate_so_hitting(chain, pprime, i, k).
std::vector<WalkStats> simulate_so_hitting_all(const EdgeChain& chain, const Vector& pprime, NodeId i,
                                               const SimulationOptions& opt);

// min{n >= 1 : X_n = i} with the first step drawn from the equilibrium p'.
WalkStats simulate_so_return(const EdgeChain& chain, const PullbackData& data, NodeId i,
                             const SimulationOptions& opt);

// First-order walk from i; time to reach the set S.
WalkStats simulate_fo_hitting(const NodeChain& chain, NodeId i, const std::vector<NodeId>& S,
                              const SimulationOptions& opt);

}  // namespace sorw

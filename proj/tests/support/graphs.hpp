#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "sorw/graph.hpp"

namespace testing_graphs {

using EdgeList = std::vector<std::pair<int, int>>;

inline sorw::GraphPtr undirected(int n, const EdgeList& edges) {
  std::vector<sorw::Edge> e;
  for (auto [u, v] : edges) {
    e.push_back({static_cast<sorw::NodeId>(u), static_cast<sorw::NodeId>(v)});
    e.push_back({static_cast<sorw::NodeId>(v), static_cast<sorw::NodeId>(u)});
  }
  return std::make_shared<const sorw::Graph>(static_cast<std::size_t>(n), std::move(e), true);
}

inline EdgeList cycle(int n) {
  EdgeList e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return e;
}

inline EdgeList complete(int n) {
  EdgeList e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return e;
}

inline EdgeList complete_bipartite(int a, int b) {
  EdgeList e;
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) e.emplace_back(i, a + j);
  return e;
}

// Connected, minimum degree >= 2: a random Hamiltonian cycle plus each other
// pair with probability p.
inline EdgeList random_connected(int n, double p, std::mt19937_64& rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::set<std::pair<int, int>> seen;
  EdgeList e;
  auto add = [&](int u, int v) {
    if (u > v) std::swap(u, v);
    if (seen.insert({u, v}).second) e.emplace_back(u, v);
  };
  for (int i = 0; i < n; ++i) add(order[i], order[(i + 1) % n]);
  std::bernoulli_distribution coin(p);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) add(u, v);
  return e;
}

}  // namespace testing_graphs

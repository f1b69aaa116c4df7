#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace sorw::detail {

// Iterative Tarjan. `for_each_successor(v, fn)` calls fn(w) for each arc v->w.
// Components come back with sorted members, ordered by their smallest member.
template <class Successors>
std::vector<std::vector<std::size_t>> tarjan_scc(std::size_t n, Successors&& for_each_successor) {
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;

  // Successor lists are materialised per visited node to allow resumption.
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> cursor(n, 0);
  std::size_t counter = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    std::vector<std::size_t> call{root};
    while (!call.empty()) {
      const std::size_t v = call.back();
      if (index[v] == unvisited) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for_each_successor(v, [&](std::size_t w) { succ[v].push_back(w); });
      }
      bool descended = false;
      while (cursor[v] < succ[v].size()) {
        const std::size_t w = succ[v][cursor[v]++];
        if (index[w] == unvisited) {
          call.push_back(w);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back();
        low[parent] = std::min(low[parent], low[v]);
      }
      std::vector<std::size_t>().swap(succ[v]);
    }
  }
  std::sort(components.begin(), components.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return components;
}

}  // namespace sorw::detail

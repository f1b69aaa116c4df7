#include "sorw/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "sorw/error.hpp"

namespace sorw {

namespace {

constexpr std::size_t kBlock = 1024;

// Inverse-CDF tables aligned with the nonzeros of a row-major matrix.
class RowSampler {
 public:
  explicit RowSampler(const SparseMatrix& P) : P_(P), cum_(static_cast<std::size_t>(P.nonZeros())) {
    for (Eigen::Index r = 0; r < P.rows(); ++r) {
      double c = 0.0;
      for (auto k = P.outerIndexPtr()[r]; k < P.outerIndexPtr()[r + 1]; ++k) {
        c += P.valuePtr()[k];
        cum_[static_cast<std::size_t>(k)] = c;
      }
    }
  }

  std::size_t sample(std::size_t row, double u) const {
    const auto lo = static_cast<std::size_t>(P_.outerIndexPtr()[row]);
    const auto hi = static_cast<std::size_t>(P_.outerIndexPtr()[row + 1]);
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(cum_.begin() + lo, cum_.begin() + hi, u * cum_[hi - 1]) - cum_.begin());
    if (k >= hi) k = hi - 1;
    // Skip explicit zeros.
    while (P_.valuePtr()[k] == 0.0 && k + 1 < hi) ++k;
    return static_cast<std::size_t>(P_.innerIndexPtr()[k]);
  }

 private:
  const SparseMatrix& P_;
  std::vector<double> cum_;
};

// Integer moments of the observed times; order independent, so the result is
// the same for every thread schedule.
struct Tally {
  std::uint64_t count = 0, sum = 0, censored = 0;
  long double sumsq = 0;

  void add(std::uint64_t t) {
    ++count;
    sum += t;
    sumsq += static_cast<long double>(t) * static_cast<long double>(t);
  }
  void merge(const Tally& o) {
    count += o.count;
    sum += o.sum;
    censored += o.censored;
    sumsq += o.sumsq;
  }
};

WalkStats finish(const Tally& t, std::size_t trials) {
  WalkStats s;
  s.trials = trials;
  s.censored = static_cast<std::size_t>(t.censored);
  s.warning = t.censored > 0;
  if (t.count == 0) {
    s.mean = std::nan("");
    s.std_error = std::nan("");
    return s;
  }
  const long double n = static_cast<long double>(t.count);
  const long double mean = static_cast<long double>(t.sum) / n;
  s.mean = static_cast<double>(mean);
  if (t.count > 1) {
    long double var = (t.sumsq - n * mean * mean) / (n - 1);
    if (var < 0) var = 0;
    s.std_error = static_cast<double>(std::sqrt(var / n));
  }
  return s;
}

void check_options(const SimulationOptions& opt) {
  if (opt.trials < 1) throw PreconditionError("trials must be at least 1");
  if (opt.cap < 1) throw PreconditionError("step cap must be at least 1");
}

// Runs body(rng, first_trial, last_trial, slot) over fixed trial blocks. Each
// block owns a generator seeded from (seed, tags, block index).
template <typename Body>
void run_blocks(const SimulationOptions& opt, std::initializer_list<std::uint64_t> tags, Body body) {
  const std::size_t blocks = (opt.trials + kBlock - 1) / kBlock;
  unsigned workers = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, blocks));
  std::vector<std::uint32_t> base{static_cast<std::uint32_t>(opt.seed),
                                  static_cast<std::uint32_t>(opt.seed >> 32)};
  for (auto t : tags) {
    base.push_back(static_cast<std::uint32_t>(t));
    base.push_back(static_cast<std::uint32_t>(t >> 32));
  }
  std::atomic<std::size_t> next{0};
  auto work = [&](unsigned slot) {
    for (std::size_t b = next++; b < blocks; b = next++) {
      std::vector<std::uint32_t> words = base;
      words.push_back(static_cast<std::uint32_t>(b));
      std::seed_seq seq(words.begin(), words.end());
      std::mt19937_64 rng(seq);
      body(rng, b * kBlock, std::min(opt.trials, (b + 1) * kBlock), slot);
    }
  };
  if (workers <= 1) {
    work(0);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  for (auto& th : pool) th.join();
}

unsigned slots(const SimulationOptions& opt) {
  return opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
}

double uniform(std::mt19937_64& rng) { return std::generate_canonical<double, 53>(rng); }

// First step out of i according to p' restricted to out_i.
EdgeId first_step(const Graph& g, const Vector& pprime, NodeId i, double u) {
  const auto out = g.out_edges(i);
  double total = 0.0;
  for (EdgeId e : out) total += pprime(static_cast<Eigen::Index>(e));
  double c = 0.0;
  const double target = u * total;
  EdgeId last = out.back();
  for (EdgeId e : out) {
    const double p = pprime(static_cast<Eigen::Index>(e));
    if (p <= 0.0) continue;
    c += p;
    last = e;
    if (target < c) return e;
  }
  return last;
}

void check_node(const Graph& g, NodeId v) {
  if (v >= g.num_nodes()) throw PreconditionError("node " + std::to_string(v) + " out of range");
}

void check_pprime(const Graph& g, const Vector& pprime, NodeId i) {
  if (pprime.size() != static_cast<Eigen::Index>(g.num_edges()))
    throw PreconditionError("first-transition vector must have one entry per edge");
  double s = 0.0;
  for (EdgeId e : g.out_edges(i)) s += pprime(static_cast<Eigen::Index>(e));
  if (!(s > 0.0)) throw PreconditionError("node '" + g.label(i) + "' has no first transition");
}

WalkStats so_walks(const EdgeChain& chain, const Vector& pprime, NodeId i, NodeId k, bool is_return,
                   const SimulationOptions& opt) {
  check_options(opt);
  const Graph& g = chain.graph();
  check_node(g, i);
  check_node(g, k);
  if (!is_return && i == k) return finish(Tally{opt.trials, 0, 0, 0}, opt.trials);
  check_pprime(g, pprime, i);
  const RowSampler sampler(chain.transition());
  std::vector<Tally> partial(slots(opt));
  run_blocks(opt, {is_return ? 2u : 1u, i, k}, [&](std::mt19937_64& rng, std::size_t from, std::size_t to, unsigned slot) {
    Tally& t = partial[slot];
    for (std::size_t trial = from; trial < to; ++trial) {
      EdgeId e = first_step(g, pprime, i, uniform(rng));
      std::uint64_t n = 1;
      while (g.edge(e).target != k && n < opt.cap) {
        e = sampler.sample(e, uniform(rng));
        ++n;
      }
      if (g.edge(e).target == k)
        t.add(n);
      else
        ++t.censored;
    }
  });
  Tally total;
  for (const auto& t : partial) total.merge(t);
  return finish(total, opt.trials);
}

}  // namespace

WalkStats simulate_so_hitting(const EdgeChain& chain, const Vector& pprime, NodeId i, NodeId k,
                              const SimulationOptions& opt) {
  return so_walks(chain, pprime, i, k, false, opt);
}

std::vector<WalkStats> simulate_so_hitting_all(const EdgeChain& chain, const Vector& pprime, NodeId i,
                                               const SimulationOptions& opt) {
  check_options(opt);
  const Graph& g = chain.graph();
  const std::size_t n = g.num_nodes();
  check_node(g, i);
  check_pprime(g, pprime, i);
  const RowSampler sampler(chain.transition());
  std::vector<std::vector<Tally>> partial(slots(opt), std::vector<Tally>(n));
  run_blocks(opt, {3u, i}, [&](std::mt19937_64& rng, std::size_t from, std::size_t to, unsigned slot) {
    auto& tallies = partial[slot];
    std::vector<std::size_t> seen(n, 0);
    const std::size_t stamp_base = from * 2 + 1;
    for (std::size_t trial = from; trial < to; ++trial) {
      const std::size_t stamp = stamp_base + (trial - from);
      seen[i] = stamp;
      tallies[i].add(0);
      std::size_t remaining = n - 1;
      EdgeId e = first_step(g, pprime, i, uniform(rng));
      std::uint64_t steps = 1;
      while (true) {
        const NodeId v = g.edge(e).target;
        if (seen[v] != stamp) {
          seen[v] = stamp;
          tallies[v].add(steps);
          --remaining;
        }
        if (remaining == 0 || steps >= opt.cap) break;
        e = sampler.sample(e, uniform(rng));
        ++steps;
      }
      if (remaining > 0)
        for (NodeId v = 0; v < n; ++v)
          if (seen[v] != stamp) ++tallies[v].censored;
    }
  });
  std::vector<WalkStats> out;
  out.reserve(n);
  for (NodeId k = 0; k < n; ++k) {
    Tally total;
    for (const auto& p : partial) total.merge(p[k]);
    out.push_back(finish(total, opt.trials));
  }
  return out;
}

WalkStats simulate_so_return(const EdgeChain& chain, const PullbackData& data, NodeId i,
                             const SimulationOptions& opt) {
  return so_walks(chain, data.first.pprime, i, i, true, opt);
}

WalkStats simulate_fo_hitting(const NodeChain& chain, NodeId i, const std::vector<NodeId>& S,
                              const SimulationOptions& opt) {
  check_options(opt);
  const std::size_t n = chain.num_states();
  if (S.empty()) throw PreconditionError("target set must be nonempty");
  std::vector<bool> target(n, false);
  for (NodeId s : S) {
    if (s >= n) throw PreconditionError("node " + std::to_string(s) + " out of range");
    target[s] = true;
  }
  if (i >= n) throw PreconditionError("node " + std::to_string(i) + " out of range");
  if (target[i]) return finish(Tally{opt.trials, 0, 0, 0}, opt.trials);
  const RowSampler sampler(chain.transition());
  std::vector<Tally> partial(slots(opt));
  run_blocks(opt, {4u, i}, [&](std::mt19937_64& rng, std::size_t from, std::size_t to, unsigned slot) {
    Tally& t = partial[slot];
    for (std::size_t trial = from; trial < to; ++trial) {
      std::size_t v = i;
      std::uint64_t steps = 0;
      while (!target[v] && steps < opt.cap) {
        v = sampler.sample(v, uniform(rng));
        ++steps;
      }
      if (target[v])
        t.add(steps);
      else
        ++t.censored;
    }
  });
  Tally total;
  for (const auto& t : partial) total.merge(t);
  return finish(total, opt.trials);
}

}  // namespace sorw

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>
#include <tuple>
#include <vector>

#include "sdq/assignment.hpp"
#include "sdq/channel.hpp"
#include "sdq/cost.hpp"
#include "sdq/error.hpp"
#include "sdq/rng.hpp"

namespace sdq {

/// A set of merged outputs with its accumulated joint mass.
struct SuperSymbol {
  std::size_t id = 0;
  std::vector<double> joint;  // sum of P_{X,Y}(., y) over members
  double mass = 0.0;
  double self_cost = 0.0;  // mass * phi(joint / mass)
  std::vector<std::size_t> members;
  bool alive = true;
};

inline SuperSymbol make_super_symbol(std::size_t id, std::vector<double> joint, std::vector<std::size_t> members,
                                     const CostFamily& cost) {
  SuperSymbol s;
  s.id = id;
  s.mass = std::accumulate(joint.begin(), joint.end(), 0.0);
  s.self_cost = cell_cost(joint, cost);
  s.joint = std::move(joint);
  s.members = std::move(members);
  return s;
}

/// One super-symbol per channel output, id = output index.
inline std::vector<SuperSymbol> singleton_symbols(const Channel& ch, const CostFamily& cost) {
  std::vector<SuperSymbol> out;
  out.reserve(2 * ch.n());
  for (std::size_t j = 0; j < ch.n(); ++j) {
    std::vector<double> joint(ch.q());
    for (std::size_t i = 0; i < ch.q(); ++i) joint[i] = ch.joint(i, j);
    out.push_back(make_super_symbol(j, std::move(joint), {j}, cost));
  }
  return out;
}

inline std::vector<double> merged_joint(const SuperSymbol& a, const SuperSymbol& b) {
  std::vector<double> j(a.joint.size());
  for (std::size_t i = 0; i < j.size(); ++i) j[i] = a.joint[i] + b.joint[i];
  return j;
}

/// Cost increase from merging two cells: cost(a u b) - cost(a) - cost(b) >= 0 for concave phi.
/// Callers pass the smaller id first so the value is reproducible bit for bit.
inline double combine_loss(const SuperSymbol& a, const SuperSymbol& b, const CostFamily& cost) {
  return cell_cost(merged_joint(a, b), cost) - a.self_cost - b.self_cost;
}

namespace detail {

inline void check_design_levels(std::size_t n, std::size_t levels) {
  if (levels < 2 || levels > n) {
    throw ValidationError("need 2 <= M <= N, got M=" + std::to_string(levels) + ", N=" + std::to_string(n));
  }
}

inline void merge_into(std::vector<SuperSymbol>& symbols, std::size_t a, std::size_t b, const CostFamily& cost) {
  std::vector<std::size_t> members = symbols[a].members;
  members.insert(members.end(), symbols[b].members.begin(), symbols[b].members.end());
  std::vector<double> joint = merged_joint(symbols[a], symbols[b]);
  symbols[a].alive = false;
  symbols[b].alive = false;
  symbols.push_back(make_super_symbol(symbols.size(), std::move(joint), std::move(members), cost));
}

// Live super-symbols become labels, ordered by smallest member.
inline Assignment to_assignment(const std::vector<SuperSymbol>& symbols, std::size_t n) {
  std::vector<const SuperSymbol*> live;
  for (const auto& s : symbols) {
    if (s.alive) live.push_back(&s);
  }
  std::sort(live.begin(), live.end(), [](const SuperSymbol* x, const SuperSymbol* y) {
    return *std::min_element(x->members.begin(), x->members.end()) <
           *std::min_element(y->members.begin(), y->members.end());
  });
  Assignment a;
  a.levels = live.size();
  a.labels.assign(n, 0);
  for (std::size_t z = 0; z < live.size(); ++z) {
    for (std::size_t j : live[z]->members) a.labels[j] = z;
  }
  return a;
}

}  // namespace detail

/// Greedy combining: N - M stages, each merging the live pair of minimum
/// loss. Every stage re-evaluates every pair, O(q N^2 (N - M)).
/// Ties go to the lexicographically smallest (id_a, id_b).
inline Assignment greedy_combining(const Channel& ch, const CostFamily& cost, std::size_t levels) {
  detail::check_design_levels(ch.n(), levels);
  auto symbols = singleton_symbols(ch, cost);
  for (std::size_t stage = 0; stage < ch.n() - levels; ++stage) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0, best_b = 0;
    bool found = false;
    for (std::size_t a = 0; a < symbols.size(); ++a) {
      if (!symbols[a].alive) continue;
      for (std::size_t b = a + 1; b < symbols.size(); ++b) {
        if (!symbols[b].alive) continue;
        const double loss = combine_loss(symbols[a], symbols[b], cost);
        if (!found || loss < best) {
          best = loss;
          best_a = a;
          best_b = b;
          found = true;
        }
      }
    }
    detail::merge_into(symbols, best_a, best_b, cost);
  }
  return detail::to_assignment(symbols, ch.n());
}

/// Binary min-heap of candidate merges keyed by (loss, id_a, id_b).
class MergeHeap {
 public:
  struct Entry {
    double loss;
    std::size_t a;
    std::size_t b;

    friend bool operator<(const Entry& x, const Entry& y) {
      return std::tie(x.loss, x.a, x.b) < std::tie(y.loss, y.a, y.b);
    }
  };

  MergeHeap() = default;

  /// Linear-time heapify.
  explicit MergeHeap(std::vector<Entry> entries) : heap_(std::move(entries)) {
    std::make_heap(heap_.begin(), heap_.end(), greater);
  }

  void push(const Entry& e) {
    heap_.push_back(e);
    std::push_heap(heap_.begin(), heap_.end(), greater);
  }

  const Entry& top() const { return heap_.front(); }

  Entry pop() {
    std::pop_heap(heap_.begin(), heap_.end(), greater);
    Entry e = heap_.back();
    heap_.pop_back();
    return e;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

  /// Parent key <= child keys everywhere.
  bool valid() const { return std::is_heap(heap_.begin(), heap_.end(), greater); }

 private:
  static bool greater(const Entry& x, const Entry& y) { return y < x; }
  std::vector<Entry> heap_;
};

struct GreedyStats {
  std::size_t loss_evaluations = 0;
  std::size_t stale_pops = 0;
  std::vector<double> stage_losses;
};

/// Greedy combining with every pair loss kept in a min-heap: losses are
/// computed once, stale entries are discarded on pop. O(q N^2 + N^2 log N)
/// time, O(N^2) extra memory. Same result as greedy_combining.
inline Assignment greedy_combining_heap(const Channel& ch, const CostFamily& cost, std::size_t levels,
                                        GreedyStats* stats = nullptr) {
  detail::check_design_levels(ch.n(), levels);
  GreedyStats local;
  GreedyStats& st = stats ? *stats : local;
  auto symbols = singleton_symbols(ch, cost);
  const std::size_t n = ch.n();

  std::vector<MergeHeap::Entry> initial;
  initial.reserve(n * (n - 1) / 2);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) initial.push_back({combine_loss(symbols[a], symbols[b], cost), a, b});
  }
  st.loss_evaluations += initial.size();
  MergeHeap heap(std::move(initial));

  for (std::size_t stage = 0; stage < n - levels; ++stage) {
    if (stage > 0) {
      const std::size_t fresh = symbols.size() - 1;
      for (std::size_t other = 0; other < fresh; ++other) {
        if (!symbols[other].alive) continue;
        heap.push({combine_loss(symbols[other], symbols[fresh], cost), other, fresh});
        ++st.loss_evaluations;
      }
    }
    MergeHeap::Entry e = heap.pop();
    while (!symbols[e.a].alive || !symbols[e.b].alive) {
      ++st.stale_pops;
      e = heap.pop();
    }
    st.stage_losses.push_back(e.loss);
    detail::merge_into(symbols, e.a, e.b, cost);
  }
  return detail::to_assignment(symbols, n);
}

/// KL(p || m) in nats; +inf when m misses part of p's support.
inline double kl_divergence(std::span<const double> p, std::span<const double> m) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (m[i] <= 0.0) return std::numeric_limits<double>::infinity();
    s += p[i] * std::log(p[i] / m[i]);
  }
  return s;
}

struct KlMeansOptions {
  std::size_t restarts = 100;    // T_i
  std::size_t iterations = 100;  // T_r
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: hardware concurrency
};

struct KlMeansResult {
  Assignment assignment;
  double mi_gap = 0.0;  // bits
  std::size_t best_restart = 0;
  /// Per restart, sum_j P_Y(y_j) KL(delta_j || mu_z(j)) after every update step.
  std::vector<std::vector<double>> objective_history;
};

namespace detail {

struct KlRestart {
  Assignment assignment;
  double gap = 0.0;
  std::vector<double> history;
};

inline KlRestart kl_means_restart(const Channel& ch, const Matrix<double>& delta, std::size_t levels,
                                  std::size_t iterations, std::uint64_t seed) {
  const std::size_t n = ch.n();
  const std::size_t q = ch.q();
  Rng rng(seed);

  std::vector<std::size_t> pick(n);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  for (std::size_t k = 0; k < levels; ++k) std::swap(pick[k], pick[k + rng.below(n - k)]);

  Matrix<double> means(levels, q);
  for (std::size_t z = 0; z < levels; ++z) {
    std::copy(delta.row(pick[z]).begin(), delta.row(pick[z]).end(), means.row(z).begin());
  }

  KlRestart out;
  out.assignment.levels = levels;
  out.assignment.labels.assign(n, 0);
  std::vector<std::size_t> previous;
  std::vector<double> div(n);
  std::vector<std::size_t> count(levels);

  for (std::size_t it = 0; it < iterations; ++it) {
    auto& labels = out.assignment.labels;
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t j = 0; j < n; ++j) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t z = 0; z < levels; ++z) {
        const double d = kl_divergence(delta.row(j), means.row(z));
        if (d < best) {
          best = d;
          arg = z;
        }
      }
      labels[j] = arg;
      div[j] = best;
      ++count[arg];
    }
    // Reseed empty clusters with the worst-served point of a cluster that can spare one.
    for (std::size_t z = 0; z < levels; ++z) {
      if (count[z] > 0) continue;
      std::size_t worst = n;
      for (std::size_t j = 0; j < n; ++j) {
        if (count[labels[j]] < 2) continue;
        if (worst == n || div[j] > div[worst]) worst = j;
      }
      --count[labels[worst]];
      labels[worst] = z;
      div[worst] = 0.0;
      count[z] = 1;
    }
    // Update: P_Y-weighted average of member posteriors.
    Matrix<double> sums(levels, q, 0.0);
    std::vector<double> mass(levels, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < q; ++i) sums(labels[j], i) += ch.joint(i, j);
      mass[labels[j]] += ch.py()[j];
    }
    for (std::size_t z = 0; z < levels; ++z) {
      for (std::size_t i = 0; i < q; ++i) means(z, i) = sums(z, i) / mass[z];
    }
    double objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) objective += ch.py()[j] * kl_divergence(delta.row(j), means.row(labels[j]));
    out.history.push_back(objective);

    if (labels == previous) break;
    previous = labels;
  }
  out.gap = mi_gap(ch, out.assignment);
  return out;
}

}  // namespace detail

/// Lloyd-style clustering of the posteriors under KL(posterior || mean),
/// best of several random restarts by MI gap. Deterministic for a given seed
/// regardless of thread count.
inline KlMeansResult kl_means(const Channel& ch, std::size_t levels, const KlMeansOptions& opts = {}) {
  if (levels < 2 || levels > ch.n()) throw ValidationError("kl_means needs 2 <= M <= N");
  if (opts.restarts < 1 || opts.iterations < 1) throw ValidationError("kl_means needs at least one restart and iteration");
  KlMeansResult result;
  if (levels == ch.n()) {
    result.assignment = Assignment::identity(ch.n());
    result.mi_gap = mi_gap(ch, result.assignment);
    return result;
  }

  const Matrix<double> delta = posteriors(ch);
  std::vector<detail::KlRestart> runs(opts.restarts);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < opts.restarts; r = next++) {
      runs[r] = detail::kl_means_restart(ch, delta, levels, opts.iterations, derive_seed(opts.seed, r));
    }
  };
  std::size_t threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, opts.restarts);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].gap < runs[best].gap) best = r;
  }
  result.assignment = runs[best].assignment;
  result.mi_gap = runs[best].gap;
  result.best_restart = best;
  result.objective_history.reserve(runs.size());
  for (auto& r : runs) result.objective_history.push_back(std::move(r.history));
  return result;
}

}  // namespace sdq

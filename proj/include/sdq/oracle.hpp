// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sdq/assignment.hpp"
#include "sdq/channel.hpp"
#include "sdq/cost.hpp"
#include "sdq/error.hpp"
#include "sdq/matrix.hpp"
#include "sdq/rng.hpp"
#include "sdq/synth.hpp"

// Brute-force ground truth for small instances.

namespace sdq {

inline constexpr double kOracleBudget = 1e6;
inline constexpr double kOracleTieTol = 1e-12;

/// Number of SDQs with M cells over N outputs, C(N-1, M-1), as a double.
inline double sdq_count(std::size_t n, std::size_t levels) {
  if (levels < 1 || levels > n) return 0.0;
  const std::size_t k = std::min(levels - 1, n - levels);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - levels + i) / static_cast<double>(i);
  return std::round(c);
}

/// Stirling number of the second kind S(N, M), as a double.
inline double dq_count(std::size_t n, std::size_t levels) {
  if (levels > n) return 0.0;
  std::vector<double> s(levels + 1, 0.0);
  s[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t m = std::min(k, levels); m >= 1; --m) s[m] = static_cast<double>(m) * s[m] + s[m - 1];
    s[0] = 0.0;
  }
  return s[levels];
}

struct OracleResult {
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::size_t>> boundaries;  // SDQ search: every optimal boundary set
  std::vector<Assignment> partitions;                // DQ search: every optimal partition, canonical labels
  std::uint64_t enumerated = 0;
};

namespace detail {

inline void check_oracle_levels(std::size_t n, std::size_t levels) {
  if (levels < 1 || levels > n) {
    throw ValidationError("oracle needs 1 <= M <= N, got M=" + std::to_string(levels) + " N=" + std::to_string(n));
  }
}

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

template <class T>
void offer(OracleResult& out, std::vector<T>& slot, double c, const T& candidate, double tol) {
  if (c < out.best_cost && !near(c, out.best_cost, tol)) {
    out.best_cost = c;
    slot.assign(1, candidate);
  } else if (near(c, out.best_cost, tol)) {
    slot.push_back(candidate);
    out.best_cost = std::min(out.best_cost, c);
  }
}

}  // namespace detail

/// Minimum of C(Lambda) over all C(N-1, M-1) boundary sets.
inline OracleResult exhaustive_sdq(const SegmentCostView& view, std::size_t levels, double budget = kOracleBudget,
                                   double tie_tol = kOracleTieTol) {
  const std::size_t n = view.n();
  detail::check_oracle_levels(n, levels);
  const double count = sdq_count(n, levels);
  if (count > budget) {
    throw BudgetExceeded("exhaustive SDQ search needs " + std::to_string(count) + " evaluations, budget is " +
                         std::to_string(budget));
  }
  OracleResult out;
  // Interior boundaries b[1..M-1] walk the combinations of {1..N-1} in lexicographic order.
  std::vector<std::size_t> b(levels + 1);
  for (std::size_t m = 0; m < levels; ++m) b[m] = m;
  b[levels] = n;
  while (true) {
    ++out.enumerated;
    detail::offer(out, out.boundaries, sdq_cost(view, b), b, tie_tol);
    std::size_t k = levels - 1;
    while (k >= 1 && b[k] == n - levels + k) --k;
    if (k == 0) break;
    ++b[k];
    for (std::size_t m = k + 1; m < levels; ++m) b[m] = b[m - 1] + 1;
  }
  return out;
}

/// Minimum of C(Q) over every deterministic quantizer with exactly M nonempty
/// cells. Partitions are walked as restricted-growth strings; splitting a cell
/// never raises the cost, so quantizers with fewer cells need not be visited.
inline OracleResult exhaustive_dq(const SegmentCostView& view, std::size_t levels, double budget = kOracleBudget,
                                  double tie_tol = kOracleTieTol) {
  const std::size_t n = view.n();
  const std::size_t q = view.q();
  detail::check_oracle_levels(n, levels);
  const double count = dq_count(n, levels);
  if (count > budget) {
    throw BudgetExceeded("exhaustive DQ search needs " + std::to_string(count) + " evaluations, budget is " +
                         std::to_string(budget));
  }
  Matrix<double> joint(q, n);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < n; ++j) joint(i, j) = view.prefix()(i, j + 1) - view.prefix()(i, j);
  }

  OracleResult out;
  Assignment a;
  a.levels = levels;
  a.labels.assign(n, 0);
  Matrix<double> cells(q, levels);
  std::vector<double> col(q);

  auto leaf = [&] {
    std::fill(cells.data().begin(), cells.data().end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < q; ++i) cells(i, a.labels[j]) += joint(i, j);
    }
    double c = 0.0;
    for (std::size_t z = 0; z < levels; ++z) {
      for (std::size_t i = 0; i < q; ++i) col[i] = cells(i, z);
      c += cell_cost(col, view.cost());
    }
    ++out.enumerated;
    detail::offer(out, out.partitions, c, a, tie_tol);
  };

  // Output 0 always opens block 0; later outputs join an open block or open the next one.
  auto rec = [&](auto&& self, std::size_t j, std::size_t used) -> void {
    if (j == n) {
      if (used == levels) leaf();
      return;
    }
    if (used + (n - j) < levels) return;
    const std::size_t top = std::min(used, levels - 1);
    for (std::size_t z = 0; z <= top; ++z) {
      a.labels[j] = z;
      self(self, j + 1, std::max(used, z + 1));
    }
  };
  rec(rec, 0, 0);
  return out;
}

/// A dominant channel whose best SDQ is worse than its best DQ.
struct GapInstance {
  Channel channel;
  std::size_t levels = 0;
  double sdq_cost = 0.0;
  double dq_cost = 0.0;
  Assignment dq_partition;
  std::uint64_t trial = 0;
};

struct HuntOptions {
  std::size_t q_min = 3, q_max = 3;
  std::size_t n_min = 3, n_max = 6;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  double alpha = 1.0;
  double gap_tol = 1e-10;  // relative
  double budget = kOracleBudget;
};

struct HuntResult {
  std::size_t trials = 0;
  std::size_t skipped = 0;  // generated channels that failed the dominance scan
  std::vector<GapInstance> gaps;
};

/// Draws random dominance-satisfying channels and compares the SDQ optimum
/// with the unrestricted DQ optimum. M ranges over [2, N-1] uniformly.
inline HuntResult hunt_sdq_gap(const HuntOptions& opts) {
  if (opts.q_min < 2 || opts.q_max < opts.q_min) throw ValidationError("hunt: bad q range");
  if (opts.n_min < 3 || opts.n_max < opts.n_min) throw ValidationError("hunt: N range must satisfy 3 <= n_min <= n_max");
  HuntResult out;
  for (std::uint64_t t = 0; t < opts.trials; ++t) {
    Rng rng(derive_seed(opts.seed, t));
    const std::size_t q = opts.q_min + rng.below(opts.q_max - opts.q_min + 1);
    const std::size_t n = opts.n_min + rng.below(opts.n_max - opts.n_min + 1);
    const std::size_t levels = 2 + rng.below(n - 2);
    Channel ch = random_dominant_channel(q, n, rng, false);
    ++out.trials;
    if (!check_dominance(ch, kDominanceTol, DominanceMode::strict).holds) {
      ++out.skipped;
      continue;
    }
    const SegmentCostView view(ch, CostFamily::alpha_mi(opts.alpha, ch.px()));
    const OracleResult sdq = exhaustive_sdq(view, levels, opts.budget);
    const OracleResult dq = exhaustive_dq(view, levels, opts.budget);
    if (sdq.best_cost - dq.best_cost > opts.gap_tol * std::max(1.0, std::abs(dq.best_cost))) {
      out.gaps.push_back({std::move(ch), levels, sdq.best_cost, dq.best_cost, dq.partitions.front(), t});
    }
  }
  return out;
}

/// Three structural properties that should coincide, evaluated on one channel.
struct StructureReport {
  bool collinear = false;
  bool sequential = false;          // posteriors sequential on a segment in the given output order
  bool dominance_relabel = false;   // collinear, and some input order gives full pairwise dominance
  bool adjacent_relabel = false;    // collinear, and some input order gives the adjacent form
  bool exhaustive = false;          // input orders searched exhaustively (q <= 7)
  std::optional<Labeling> input_labeling;  // an order witnessing full dominance, when found
  bool agree() const { return sequential == dominance_relabel && dominance_relabel == adjacent_relabel; }
};

inline constexpr std::size_t kStructureExhaustiveQ = 7;

inline StructureReport verify_structure(const Channel& ch, double collinear_tol = kCollinearTol,
                                      double dominance_tol = kDominanceTol) {
  StructureReport rep;
  const PosteriorGeometry g = posterior_geometry(ch, collinear_tol);
  rep.collinear = g.collinear;
  rep.sequential = g.sequential;
  if (!g.collinear) return rep;

  auto test = [&](const Labeling& lab) {
    const Channel c = relabel_inputs(ch, lab);
    const bool full = check_dominance(c, dominance_tol, DominanceMode::strict).holds;
    const bool adjacent = check_dominance(c, dominance_tol, DominanceMode::adjacent).holds;
    if (full && !rep.dominance_relabel) {
      rep.dominance_relabel = true;
      rep.input_labeling = lab;
    }
    rep.adjacent_relabel = rep.adjacent_relabel || adjacent;
  };

  if (ch.q() <= kStructureExhaustiveQ) {
    rep.exhaustive = true;
    Labeling lab = Labeling::identity(ch.q());
    do {
      test(lab);
    } while (!(rep.dominance_relabel && rep.adjacent_relabel) && std::next_permutation(lab.perm.begin(), lab.perm.end()));
  } else {
    test(relabel_inputs_dominant(ch, dominance_tol).labeling);
  }
  return rep;
}

}  // namespace sdq

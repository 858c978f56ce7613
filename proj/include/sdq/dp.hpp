// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdq/assignment.hpp"
#include "sdq/cost.hpp"
#include "sdq/error.hpp"
#include "sdq/matrix.hpp"
#include "sdq/smawk.hpp"

namespace sdq {

/// Default slack tolerance for the quadrangle-inequality scan.
inline constexpr double kQiTol = 1e-10;

enum class Engine { standard, yao, smawk };

inline const char* to_string(Engine e) {
  switch (e) {
    case Engine::standard: return "dp";
    case Engine::yao: return "dp-yao";
    case Engine::smawk: return "dp-smawk";
  }
  return "?";
}

enum class TieMode { first, all };

inline constexpr std::size_t kNoSol = std::numeric_limits<std::size_t>::max();

/// dp(n, m) = optimal cost of quantizing outputs 1..n to m levels, and
/// sol(n, m) the last boundary before n in that optimum. Both are
/// (N+1) x (M+1); cells outside the computed region hold NaN / kNoSol.
struct DpTables {
  Matrix<double> dp;
  Matrix<std::size_t> sol;

  bool filled(std::size_t n, std::size_t m) const {
    return n < sol.rows() && m < sol.cols() && sol(n, m) != kNoSol;
  }

  /// Column m of dp, indexed by n.
  std::vector<double> layer(std::size_t m) const {
    std::vector<double> out(dp.rows());
    for (std::size_t n = 0; n < dp.rows(); ++n) out[n] = dp(n, m);
    return out;
  }
};

struct DpStats {
  std::size_t w_evaluations = 0;
  std::size_t widened_cells = 0;  // Yao cells that fell back to the full window
};

struct SdqSolution {
  std::vector<std::size_t> boundaries;  // 0 = l_0 < ... < l_M = N
  double cost = 0.0;
  Engine engine = Engine::standard;
  std::optional<DpTables> tables;
  DpStats stats;
  std::vector<std::vector<std::size_t>> all_optimal;  // TieMode::all only
  bool truncated = false;

  Assignment assignment() const { return Assignment::from_boundaries(boundaries); }
};

struct QiReport {
  bool holds = true;
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;  // (r, s), 1-based
  double slack_min = std::numeric_limits<double>::infinity();
};

/// Scans w(r,s) + w(r+1,s+1) <= w(r,s+1) + w(r+1,s) for 1 <= r < s < N.
inline QiReport check_qi(const SegmentCostView& view, double tol = kQiTol) {
  QiReport rep;
  const std::size_t n = view.n();
  if (n < 3) return rep;
  std::vector<double> upper(n + 1), lower(n + 1);
  for (std::size_t s = 1; s <= n; ++s) upper[s] = view.w(1, s);
  for (std::size_t r = 1; r + 1 < n; ++r) {
    for (std::size_t s = r + 1; s <= n; ++s) lower[s] = view.w(r + 1, s);
    for (std::size_t s = r + 1; s < n; ++s) {
      const double slack = upper[s + 1] + lower[s] - upper[s] - lower[s + 1];
      if (slack < rep.slack_min) rep.slack_min = slack;
      if (slack < -tol && rep.holds) {
        rep.holds = false;
        rep.first_violation = std::pair{r, s};
      }
    }
    std::swap(upper, lower);
  }
  return rep;
}

/// What a QI-dependent engine may rely on: a scan result or the caller's word.
struct QiBasis {
  bool assumed = false;
  std::optional<QiReport> report;

  static QiBasis assume() { return {true, std::nullopt}; }
  static QiBasis from(QiReport r) { return {false, std::move(r)}; }

  bool trusted() const { return assumed || (report && report->holds); }
};

struct DpOptions {
  TieMode tie = TieMode::first;
  bool keep_tables = false;
  std::size_t enumeration_cap = 10000;
  double tie_tol = 1e-12;  // relative, for TieMode::all
};

/// d(i, j) = dp(j+m-1, m-1) + w(j+m, i+m) for i >= j, upper otherwise;
/// (N-M+1) x (N-M+1). prev_layer is dp(., m-1) indexed by n.
inline LazyMatrix<Bounded<double>> layer_matrix(const SegmentCostView& view, std::span<const double> prev_layer,
                                                std::size_t m, std::size_t levels) {
  const std::size_t size = view.n() - levels + 1;
  return LazyMatrix<Bounded<double>>(size, size, [&view, prev_layer, m](std::size_t i, std::size_t j) {
    if (i < j) return Bounded<double>::top();
    return Bounded<double>::of(prev_layer[j + m - 1] + view.w(j + m, i + m));
  });
}

namespace detail {

inline void check_levels(const SegmentCostView& view, std::size_t levels) {
  if (levels < 2 || levels > view.n()) {
    throw ValidationError("need 2 <= M <= N, got M=" + std::to_string(levels) + ", N=" + std::to_string(view.n()));
  }
}

// All posteriors equal: every quantizer costs the same, return the even split.
inline SdqSolution uniform_split(const SegmentCostView& view, std::size_t levels, Engine engine) {
  SdqSolution s;
  s.engine = engine;
  s.boundaries.resize(levels + 1);
  for (std::size_t m = 0; m <= levels; ++m) s.boundaries[m] = m * view.n() / levels;
  s.cost = sdq_cost(view, s.boundaries);
  s.stats.w_evaluations = levels;
  return s;
}

class DpRun {
 public:
  DpRun(const SegmentCostView& view, std::size_t levels, Engine engine, const DpOptions& opts)
      : view_(view),
        n_(view.n()),
        levels_(levels),
        opts_(opts),
        prev_(n_ + 1, std::numeric_limits<double>::quiet_NaN()),
        cur_(n_ + 1, std::numeric_limits<double>::quiet_NaN()),
        sol_(n_ + 1, levels + 1, kNoSol) {
    result_.engine = engine;
    if (opts.keep_tables) full_ = Matrix<double>(n_ + 1, levels + 1, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t n = 1; n <= n_ - levels_ + 1; ++n) {
      prev_[n] = w(1, n);
      sol_(n, 1) = 0;
      if (full_) (*full_)(n, 1) = prev_[n];
    }
  }

  double w(std::size_t l, std::size_t r) {
    ++result_.stats.w_evaluations;
    return view_.w(l, r);
  }

  // Leftmost argmin of dp(t, m-1) + w(t+1, n) over t in [lo, hi].
  std::pair<double, std::size_t> scan(std::size_t n, std::size_t lo, std::size_t hi) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = lo;
    for (std::size_t t = lo; t <= hi; ++t) {
      const double v = prev_[t] + w(t + 1, n);
      if (v < best) {
        best = v;
        arg = t;
      }
    }
    return {best, arg};
  }

  void set(std::size_t n, std::size_t m, double value, std::size_t arg) {
    cur_[n] = value;
    sol_(n, m) = arg;
    if (full_) (*full_)(n, m) = value;
  }

  void next_layer() {
    std::swap(prev_, cur_);
    std::fill(cur_.begin(), cur_.end(), std::numeric_limits<double>::quiet_NaN());
  }

  std::size_t sol(std::size_t n, std::size_t m) const { return sol_(n, m); }
  std::span<const double> prev() const { return prev_; }
  DpStats& stats() { return result_.stats; }

  SdqSolution finish() {
    result_.cost = prev_[n_];
    result_.boundaries.assign(levels_ + 1, 0);
    result_.boundaries[levels_] = n_;
    for (std::size_t m = levels_; m >= 1; --m) result_.boundaries[m - 1] = sol_(result_.boundaries[m], m);
    if (opts_.keep_tables) result_.tables = DpTables{std::move(*full_), std::move(sol_)};
    return std::move(result_);
  }

 private:
  const SegmentCostView& view_;
  std::size_t n_;
  std::size_t levels_;
  DpOptions opts_;
  std::vector<double> prev_;
  std::vector<double> cur_;
  Matrix<std::size_t> sol_;
  std::optional<Matrix<double>> full_;
  SdqSolution result_;
};

}  // namespace detail

/// Every optimal boundary set (ties within tie_tol relative), up to cap.
/// *truncated is set when more than cap optima exist.
inline std::vector<std::vector<std::size_t>> enumerate_optimal(const SegmentCostView& view, std::size_t levels,
                                                               std::size_t cap, bool* truncated,
                                                               double tie_tol = 1e-12) {
  detail::check_levels(view, levels);
  const std::size_t n_total = view.n();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> prev(n_total + 1, nan), cur(n_total + 1, nan);
  // ties[m][n] = every t achieving dp(n, m) within tolerance
  std::vector<std::vector<std::vector<std::size_t>>> ties(levels + 1,
                                                          std::vector<std::vector<std::size_t>>(n_total + 1));
  for (std::size_t n = 1; n <= n_total - levels + 1; ++n) {
    prev[n] = view.w(1, n);
    ties[1][n] = {0};
  }
  std::vector<double> values;
  for (std::size_t m = 2; m <= levels; ++m) {
    for (std::size_t n = n_total - levels + m; n >= m; --n) {
      values.clear();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t t = m - 1; t <= n - 1; ++t) {
        values.push_back(prev[t] + view.w(t + 1, n));
        best = std::min(best, values.back());
      }
      const double slack = tie_tol * std::max(1.0, std::abs(best));
      for (std::size_t t = m - 1; t <= n - 1; ++t) {
        if (values[t - (m - 1)] <= best + slack) ties[m][n].push_back(t);
      }
      cur[n] = best;
    }
    std::swap(prev, cur);
  }

  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> stack(levels + 1, 0);
  stack[levels] = n_total;
  bool more = false;
  auto walk = [&](auto&& self, std::size_t m) -> void {
    if (more) return;
    if (m == 0) {
      if (out.size() == cap) {
        more = true;
        return;
      }
      out.push_back(stack);
      return;
    }
    for (std::size_t t : ties[m][stack[m]]) {
      stack[m - 1] = t;
      self(self, m - 1);
      if (more) return;
    }
  };
  walk(walk, levels);
  if (truncated) *truncated = more;
  return out;
}

/// Optimal SDQ by the O(q (N-M)^2 M) recursion dp(n,m) = min_t dp(t,m-1) + w(t+1,n).
/// n runs downwards inside each layer; ties go to the smallest t.
inline SdqSolution dp_standard(const SegmentCostView& view, std::size_t levels, const DpOptions& opts = {}) {
  detail::check_levels(view, levels);
  if (view.degenerate()) return detail::uniform_split(view, levels, Engine::standard);
  const std::size_t n_total = view.n();
  detail::DpRun run(view, levels, Engine::standard, opts);
  for (std::size_t m = 2; m <= levels; ++m) {
    for (std::size_t n = n_total - levels + m; n >= m; --n) {
      auto [value, arg] = run.scan(n, m - 1, n - 1);
      run.set(n, m, value, arg);
    }
    run.next_layer();
  }
  SdqSolution out = run.finish();
  if (opts.tie == TieMode::all) {
    out.all_optimal = enumerate_optimal(view, levels, opts.enumeration_cap, &out.truncated, opts.tie_tol);
  }
  return out;
}

/// Optimal SDQ with the search for sol(n, m) restricted to
/// [max(m-1, sol(n, m-1)), min(n-1, sol(n+1, m))], valid under the QI.
///
/// An untrusted basis (a QI scan that failed) runs every cell on the full
/// window. A trusted basis whose window comes out empty widens that cell.
/// Both cases are counted in stats.widened_cells.
inline SdqSolution dp_yao(const SegmentCostView& view, std::size_t levels, const QiBasis& basis,
                          const DpOptions& opts = {}) {
  detail::check_levels(view, levels);
  if (view.degenerate()) return detail::uniform_split(view, levels, Engine::yao);
  const std::size_t n_total = view.n();
  const bool restrict = basis.trusted();
  detail::DpRun run(view, levels, Engine::yao, opts);
  for (std::size_t m = 2; m <= levels; ++m) {
    const std::size_t top = n_total - levels + m;
    for (std::size_t n = top; n >= m; --n) {
      std::size_t lo = m - 1;
      std::size_t hi = n - 1;
      if (restrict) {
        if (n < top) {
          lo = std::max(lo, run.sol(n, m - 1));
          hi = std::min(hi, run.sol(n + 1, m));
        }
        if (lo > hi) {
          lo = m - 1;
          hi = n - 1;
          ++run.stats().widened_cells;
        }
      } else {
        ++run.stats().widened_cells;
      }
      auto [value, arg] = run.scan(n, lo, hi);
      run.set(n, m, value, arg);
    }
    run.next_layer();
  }
  return run.finish();
}

/// Optimal SDQ with each layer solved as leftmost row minima of the
/// totally monotone matrix D^m by SMAWK; O(q (N-M) M) under the QI.
/// Throws QiRequired when the basis is a failed QI scan.
inline SdqSolution dp_smawk(const SegmentCostView& view, std::size_t levels, const QiBasis& basis,
                            const DpOptions& opts = {}) {
  detail::check_levels(view, levels);
  if (!basis.trusted()) {
    std::string where;
    if (basis.report && basis.report->first_violation) {
      where = " at (r, s) = (" + std::to_string(basis.report->first_violation->first) + ", " +
              std::to_string(basis.report->first_violation->second) + ")";
    }
    throw QiRequired("segment cost violates the quadrangle inequality" + where + "; use the standard DP");
  }
  if (view.degenerate()) return detail::uniform_split(view, levels, Engine::smawk);
  detail::DpRun run(view, levels, Engine::smawk, opts);
  for (std::size_t m = 2; m <= levels; ++m) {
    auto d = layer_matrix(view, run.prev(), m, levels);
    const auto minima = row_minima(d);
    for (std::size_t i = 0; i < minima.size(); ++i) {
      const std::size_t j = minima[i];
      run.set(i + m, m, d(i, j).value, j + m - 1);
    }
    run.stats().w_evaluations += d.evaluations();
    run.next_layer();
  }
  return run.finish();
}

inline SdqSolution run_engine(Engine engine, const SegmentCostView& view, std::size_t levels, const QiBasis& basis,
                              const DpOptions& opts = {}) {
  switch (engine) {
    case Engine::standard: return dp_standard(view, levels, opts);
    case Engine::yao: return dp_yao(view, levels, basis, opts);
    case Engine::smawk: return dp_smawk(view, levels, basis, opts);
  }
  throw ValidationError("unknown engine");
}

}  // namespace sdq

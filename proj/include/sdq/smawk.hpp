// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <compare>
#include <concepts>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sdq {

/// A value or a symbolic "upper" that compares above every value.
/// Two uppers compare equal. No arithmetic ever touches the sentinel.
template <class T>
struct Bounded {
  T value{};
  bool upper = false;

  static Bounded top() { return {T{}, true}; }
  static Bounded of(T v) { return {std::move(v), false}; }

  friend bool operator<(const Bounded& a, const Bounded& b) {
    if (a.upper) return false;
    if (b.upper) return true;
    return a.value < b.value;
  }
  friend bool operator==(const Bounded& a, const Bounded& b) {
    if (a.upper || b.upper) return a.upper == b.upper;
    return a.value == b.value;
  }
};

/// rows x cols matrix whose entries are produced on demand by an oracle.
/// Counts oracle calls.
template <class Value>
class LazyMatrix {
 public:
  using value_type = Value;
  using Oracle = std::function<Value(std::size_t, std::size_t)>;

  LazyMatrix(std::size_t rows, std::size_t cols, Oracle oracle)
      : rows_(rows), cols_(cols), oracle_(std::move(oracle)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Value operator()(std::size_t r, std::size_t c) const {
    ++evaluations_;
    return oracle_(r, c);
  }

  std::size_t evaluations() const { return evaluations_; }
  void reset_evaluations() const { evaluations_ = 0; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  Oracle oracle_;
  mutable std::size_t evaluations_ = 0;
};

template <class M>
concept RowMinimaMatrix = requires(const M& m, std::size_t i) {
  { m.rows() } -> std::convertible_to<std::size_t>;
  { m.cols() } -> std::convertible_to<std::size_t>;
  { m(i, i) < m(i, i) } -> std::convertible_to<bool>;
};

/// Upper bound on oracle calls per (rows + cols) made by row_minima.
inline constexpr std::size_t kSmawkEvaluationFactor = 8;

namespace detail {

template <class M>
void smawk(const M& a, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
           std::vector<std::size_t>& result) {
  if (rows.empty()) return;

  // REDUCE: drop columns that cannot hold a leftmost row minimum, leaving at most |rows|.
  // The value at (row of the stack top, stack top) is kept alongside to halve oracle calls.
  using V = decltype(a(0, 0));
  std::vector<std::size_t> kept;
  std::vector<V> top_value;
  kept.reserve(std::min(rows.size(), cols.size()));
  top_value.reserve(kept.capacity());
  for (std::size_t c : cols) {
    while (!kept.empty()) {
      const std::size_t r = rows[kept.size() - 1];
      V challenger = a(r, c);
      if (!(challenger < top_value.back())) break;
      kept.pop_back();
      top_value.pop_back();
    }
    if (kept.size() < rows.size()) {
      kept.push_back(c);
      top_value.push_back(a(rows[kept.size() - 1], c));
    }
  }

  std::vector<std::size_t> odd;
  odd.reserve(rows.size() / 2);
  for (std::size_t k = 1; k < rows.size(); k += 2) odd.push_back(rows[k]);
  smawk(a, odd, kept, result);

  // INTERPOLATE: the minimum of an even row lies between the minima of its odd neighbours.
  std::size_t start = 0;
  for (std::size_t k = 0; k < rows.size(); k += 2) {
    const std::size_t r = rows[k];
    std::size_t stop = kept.size() - 1;
    if (k + 1 < rows.size()) {
      const std::size_t next = result[rows[k + 1]];
      while (kept[stop] != next) --stop;
    }
    std::size_t best = kept[start];
    V best_value = a(r, best);
    for (std::size_t idx = start + 1; idx <= stop; ++idx) {
      V v = a(r, kept[idx]);
      if (v < best_value) {
        best_value = std::move(v);
        best = kept[idx];
      }
    }
    result[r] = best;
    start = stop;
  }
}

}  // namespace detail

/// Leftmost row minima of a totally monotone matrix (SMAWK).
///
/// Total monotonicity is the caller's responsibility: for rows k < l and
/// columns i < j, a(k,i) > a(k,j) must imply a(l,i) > a(l,j). The result on
/// other inputs is some column per row, without a correctness guarantee.
template <RowMinimaMatrix M>
std::vector<std::size_t> row_minima(const M& a) {
  std::vector<std::size_t> result(a.rows(), 0);
  if (a.rows() == 0 || a.cols() == 0) return result;
  std::vector<std::size_t> rows(a.rows()), cols(a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  detail::smawk(a, rows, cols, result);
  return result;
}

/// Leftmost row minima by full scan.
template <RowMinimaMatrix M>
std::vector<std::size_t> row_minima_brute(const M& a) {
  std::vector<std::size_t> result(a.rows(), 0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    if (a.cols() == 0) break;
    auto best = a(r, 0);
    for (std::size_t c = 1; c < a.cols(); ++c) {
      auto v = a(r, c);
      if (v < best) {
        best = std::move(v);
        result[r] = c;
      }
    }
  }
  return result;
}

/// row_minima followed by a full-scan verification; throws std::logic_error
/// when the input turned out not to be totally monotone.
template <RowMinimaMatrix M>
std::vector<std::size_t> row_minima_checked(const M& a) {
  auto fast = row_minima(a);
  auto slow = row_minima_brute(a);
  if (fast != slow) throw std::logic_error("row_minima: matrix is not totally monotone");
  return fast;
}

}  // namespace sdq

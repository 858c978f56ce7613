// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

// Independent reference computations for tests. Nothing here goes through
// prefix sums, DP tables or the library's cost family.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "sdq/sdq.hpp"

namespace sdq::testing {

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// phi_alpha straight from the defining formulas, in the requested base.
inline double naive_phi(const std::vector<double>& dist, std::span<const double> px, double alpha,
                        LogBase base = LogBase::two) {
  const double f = base == LogBase::two ? 1.0 / std::log(2.0) : 1.0;
  if (std::abs(alpha - 1.0) <= 1e-9) {
    double h = 0.0;
    for (double d : dist) {
      if (d > 0.0) h -= d * std::log(d) * f;
    }
    return h;
  }
  if (std::isinf(alpha)) {
    double m = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) m = std::max(m, dist[i] / px[i]);
    return -m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) s += std::pow(px[i], 1.0 - alpha) * std::pow(dist[i], alpha);
  const double v = std::pow(s, 1.0 / alpha);
  return alpha < 1.0 ? v : -v;
}

/// Cost of a general quantizer: per-cell joint by a double loop, then mass * phi.
inline double naive_assignment_cost(const Channel& ch, const Assignment& a, double alpha, LogBase base = LogBase::two) {
  double total = 0.0;
  for (std::size_t z = 0; z < a.levels; ++z) {
    std::vector<double> joint(ch.q(), 0.0);
    double mass = 0.0;
    for (std::size_t j = 0; j < ch.n(); ++j) {
      if (a.labels[j] != z) continue;
      for (std::size_t i = 0; i < ch.q(); ++i) {
        joint[i] += ch.px()[i] * ch.pyx(i, j);
        mass += ch.px()[i] * ch.pyx(i, j);
      }
    }
    if (mass <= 0.0) continue;
    for (auto& v : joint) v /= mass;
    total += mass * naive_phi(joint, ch.px(), alpha, base);
  }
  return total;
}

/// w(l, r), 1-based inclusive, by direct summation.
inline double naive_w(const Channel& ch, std::size_t l, std::size_t r, double alpha, LogBase base = LogBase::two) {
  Assignment a;
  a.levels = 2;
  a.labels.assign(ch.n(), 1);
  for (std::size_t j = l - 1; j < r; ++j) a.labels[j] = 0;
  std::vector<double> joint(ch.q(), 0.0);
  double mass = 0.0;
  for (std::size_t j = l - 1; j < r; ++j) {
    for (std::size_t i = 0; i < ch.q(); ++i) {
      joint[i] += ch.px()[i] * ch.pyx(i, j);
      mass += ch.px()[i] * ch.pyx(i, j);
    }
  }
  for (auto& v : joint) v /= mass;
  return mass * naive_phi(joint, ch.px(), alpha, base);
}

/// Shannon I(X; Z) in bits, straight from the definition.
inline double naive_mi(const Channel& ch, const Assignment& a) {
  std::vector<double> pz(a.levels, 0.0);
  std::vector<std::vector<double>> pxz(ch.q(), std::vector<double>(a.levels, 0.0));
  for (std::size_t j = 0; j < ch.n(); ++j) {
    for (std::size_t i = 0; i < ch.q(); ++i) {
      pxz[i][a.labels[j]] += ch.px()[i] * ch.pyx(i, j);
      pz[a.labels[j]] += ch.px()[i] * ch.pyx(i, j);
    }
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < ch.q(); ++i) {
    for (std::size_t z = 0; z < a.levels; ++z) {
      if (pxz[i][z] > 0.0) mi += pxz[i][z] * std::log2(pxz[i][z] / (ch.px()[i] * pz[z]));
    }
  }
  return mi;
}

/// Every boundary set by recursion (independent of the library's combination walk).
inline void all_boundaries(std::size_t n, std::size_t levels, std::vector<std::size_t>& cur,
                           std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == levels) {
    auto b = cur;
    b.push_back(n);
    out.push_back(b);
    return;
  }
  const std::size_t remaining = levels - cur.size();
  for (std::size_t next = cur.back() + 1; next + remaining <= n; ++next) {
    cur.push_back(next);
    all_boundaries(n, levels, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<std::size_t>> all_boundaries(std::size_t n, std::size_t levels) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur{0};
  all_boundaries(n, levels, cur, out);
  return out;
}

/// Brute-force SDQ optimum via naive costs.
inline double naive_best_sdq(const Channel& ch, std::size_t levels, double alpha) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : all_boundaries(ch.n(), levels)) {
    best = std::min(best, naive_assignment_cost(ch, Assignment::from_boundaries(b), alpha));
  }
  return best;
}

/// Random Monge matrix: a(i,j) = f(i) + g(j) + sum over a random nonnegative density
/// below-left, so every 2x2 submatrix satisfies a(i,j) + a(i',j') <= a(i,j') + a(i',j).
inline Matrix<double> random_monge(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix<double> density(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) density(i, j) = rng.below(4) == 0 ? 0.0 : static_cast<double>(rng.below(5));
  }
  // a(i, j) = -sum_{k <= i, l <= j} density(k, l) is Monge; add random row and column offsets.
  Matrix<double> a(rows, cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double run = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      run += density(i, j);
      a(i, j) = -run + (i > 0 ? a(i - 1, j) : 0.0);
    }
  }
  std::vector<double> f(rows), g(cols);
  for (auto& v : f) v = static_cast<double>(rng.below(50));
  for (auto& v : g) v = static_cast<double>(rng.below(50));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) a(i, j) += f[i] + g[j];
  }
  return a;
}

/// Matrix adapter that counts entry reads.
struct CountingMatrix {
  const Matrix<double>* m;
  mutable std::size_t reads = 0;
  std::size_t rows() const { return m->rows(); }
  std::size_t cols() const { return m->cols(); }
  double operator()(std::size_t i, std::size_t j) const {
    ++reads;
    return (*m)(i, j);
  }
};

}  // namespace sdq::testing

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "sdq/channel.hpp"
#include "sdq/error.hpp"
#include "sdq/matrix.hpp"
#include "sdq/rng.hpp"

// Random channel generators for tests, benchmarks and the gap hunter.

namespace sdq {

namespace detail {

inline std::vector<double> dirichlet_one(std::size_t k, Rng& rng) {
  std::vector<double> v(k);
  double sum = 0.0;
  for (auto& x : v) {
    x = rng.exponential();
    sum += x;
  }
  for (auto& x : v) x /= sum;
  return v;
}

inline void check_shape(std::size_t q, std::size_t n) {
  if (q < 2 || n < 2) throw ValidationError("synthetic channels need q >= 2 and n >= 2");
}

}  // namespace detail

/// Rows drawn uniformly from the simplex; px uniform or also Dirichlet(1).
inline Channel random_channel(std::size_t q, std::size_t n, Rng& rng, bool uniform_px = true) {
  detail::check_shape(q, n);
  std::vector<double> px = uniform_px ? std::vector<double>(q, 1.0 / static_cast<double>(q)) : detail::dirichlet_one(q, rng);
  Matrix<double> pyx(q, n);
  for (std::size_t i = 0; i < q; ++i) {
    auto row = detail::dirichlet_one(n, rng);
    std::copy(row.begin(), row.end(), pyx.row(i).begin());
  }
  return Channel(std::move(px), std::move(pyx));
}

/// Channel whose posteriors lie, in output order, on the segment between two
/// random simplex points: delta_j = a + t_j (b - a) with 0 = t_1 <= ... <= t_n = 1.
inline Channel random_sequential_channel(std::size_t q, std::size_t n, Rng& rng) {
  detail::check_shape(q, n);
  const auto a = detail::dirichlet_one(q, rng);
  const auto b = detail::dirichlet_one(q, rng);
  std::vector<double> t(n);
  t.front() = 0.0;
  t.back() = 1.0;
  for (std::size_t j = 1; j + 1 < n; ++j) t[j] = rng.uniform();
  std::sort(t.begin(), t.end());
  const auto py = detail::dirichlet_one(n, rng);

  Matrix<double> joint(q, n);
  std::vector<double> px(q, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < q; ++i) {
      const double delta = (1.0 - t[j]) * a[i] + t[j] * b[i];
      joint(i, j) = py[j] * delta;
      px[i] += joint(i, j);
    }
  }
  const double total = std::accumulate(px.begin(), px.end(), 0.0);
  for (auto& v : px) v /= total;
  Matrix<double> pyx(q, n);
  for (std::size_t i = 0; i < q; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) row_sum += joint(i, j);
    for (std::size_t j = 0; j < n; ++j) pyx(i, j) = joint(i, j) / row_sum;
  }
  return Channel(std::move(px), std::move(pyx));
}

/// Exponential-family channel P(y_j|x_i) proportional to h_j exp(theta_i s_j)
/// with theta and s both decreasing. Every pair of rows is likelihood-ratio
/// ordered, so the dominance condition holds in the natural input order.
inline Channel random_dominant_channel(std::size_t q, std::size_t n, Rng& rng, bool uniform_px = true) {
  detail::check_shape(q, n);
  std::vector<double> theta(q), s(n), h(n);
  for (auto& v : theta) v = rng.uniform(-2.0, 2.0);
  for (auto& v : s) v = rng.uniform(-1.0, 1.0);
  for (auto& v : h) v = rng.uniform(0.05, 1.0);
  std::sort(theta.begin(), theta.end(), std::greater<>());
  std::sort(s.begin(), s.end(), std::greater<>());

  std::vector<double> px = uniform_px ? std::vector<double>(q, 1.0 / static_cast<double>(q)) : detail::dirichlet_one(q, rng);
  Matrix<double> pyx(q, n);
  for (std::size_t i = 0; i < q; ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      pyx(i, j) = h[j] * std::exp(theta[i] * s[j]);
      z += pyx(i, j);
    }
    for (std::size_t j = 0; j < n; ++j) pyx(i, j) /= z;
  }
  return Channel(std::move(px), std::move(pyx));
}

/// Uniformly random permutation of [n].
inline Labeling random_labeling(std::size_t n, Rng& rng) {
  Labeling lab = Labeling::identity(n);
  rng.shuffle(std::span<std::size_t>(lab.perm));
  return lab;
}

}  // namespace sdq

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sdq/channel.hpp"

namespace sdq {

/// Standard normal CDF, through erfc so that both tails keep relative accuracy.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// P(a < Z <= b) for a standard normal Z, a <= b. Infinite endpoints allowed.
inline double normal_interval(double a, double b) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  if (a >= 0.0) return 0.5 * (std::erfc(a * inv_sqrt2) - std::erfc(b * inv_sqrt2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b * inv_sqrt2) - std::erfc(-a * inv_sqrt2));
  return 1.0 - 0.5 * std::erfc(-a * inv_sqrt2) - 0.5 * std::erfc(b * inv_sqrt2);
}

/// PAM over AWGN, pre-discretized to n uniform output cells.
struct PamSpec {
  std::vector<double> levels;  // strictly increasing amplitudes
  double sigma = 1.0;
  std::size_t n = 128;
  std::optional<double> gamma_lo;  // defaults to levels.front() - 3 sigma
  std::optional<double> gamma_hi;  // defaults to levels.back() + 3 sigma
  std::vector<double> px;          // empty means uniform

  /// Levels x_i = 2i - q - 1.
  static PamSpec standard(std::size_t q, double sigma, std::size_t n) {
    PamSpec s;
    s.levels.resize(q);
    for (std::size_t i = 1; i <= q; ++i) s.levels[i - 1] = 2.0 * static_cast<double>(i) - static_cast<double>(q) - 1.0;
    s.sigma = sigma;
    s.n = n;
    return s;
  }

  std::size_t q() const { return levels.size(); }
};

inline void validate(const PamSpec& s) {
  if (s.levels.size() < 2) throw ValidationError("PAM needs at least 2 levels");
  for (std::size_t i = 1; i < s.levels.size(); ++i) {
    if (!(s.levels[i] > s.levels[i - 1])) throw ValidationError("PAM levels must be strictly increasing");
  }
  if (!(s.sigma > 0.0) || !std::isfinite(s.sigma)) throw ValidationError("PAM sigma must be positive and finite");
  if (s.n < 3) throw ValidationError("PAM discretization needs n >= 3, got " + std::to_string(s.n));
  if (!s.px.empty() && s.px.size() != s.levels.size()) throw ValidationError("PAM px size differs from level count");
}

/// Candidate thresholds gamma_0 = -inf < gamma_1 < ... < gamma_{n-1} < gamma_n = +inf.
inline std::vector<double> pam_thresholds(const PamSpec& s) {
  validate(s);
  const double lo = s.gamma_lo.value_or(s.levels.front() - 3.0 * s.sigma);
  const double hi = s.gamma_hi.value_or(s.levels.back() + 3.0 * s.sigma);
  if (!(hi > lo)) throw ValidationError("PAM threshold range is empty");
  const std::size_t n = s.n;
  std::vector<double> g(n + 1);
  g[0] = -std::numeric_limits<double>::infinity();
  g[n] = std::numeric_limits<double>::infinity();
  const double step = (hi - lo) / static_cast<double>(n - 2);
  for (std::size_t j = 1; j + 1 < n; ++j) g[j] = lo + static_cast<double>(j - 1) * step;
  g[n - 1] = hi;
  return g;
}

struct PamChannel {
  Channel channel;
  std::vector<double> thresholds;
  bool renormalized = false;  // some raw row sum missed 1 by more than kProbabilityTol
};

inline PamChannel discretize_pam(const PamSpec& s) {
  PamChannel out;
  out.thresholds = pam_thresholds(s);
  const std::size_t q = s.q();
  const std::size_t n = s.n;
  Matrix<double> pyx(q, n);
  for (std::size_t i = 0; i < q; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = (out.thresholds[j] - s.levels[i]) / s.sigma;
      const double b = (out.thresholds[j + 1] - s.levels[i]) / s.sigma;
      pyx(i, j) = normal_interval(a, b);
      sum += pyx(i, j);
    }
    if (std::abs(sum - 1.0) > kProbabilityTol) {
      out.renormalized = true;
      for (std::size_t j = 0; j < n; ++j) pyx(i, j) /= sum;
    }
  }
  std::vector<double> px = s.px.empty() ? std::vector<double>(q, 1.0 / static_cast<double>(q)) : s.px;
  out.channel = make_channel(std::move(px), std::move(pyx));
  return out;
}

}  // namespace sdq

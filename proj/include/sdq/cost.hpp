// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sdq/assignment.hpp"
#include "sdq/channel.hpp"
#include "sdq/error.hpp"
#include "sdq/matrix.hpp"
#include "sdq/rng.hpp"

namespace sdq {

enum class LogBase { two, e };

/// Multiplier turning a natural log into the requested base.
inline double log_factor(LogBase base) { return base == LogBase::two ? 1.0 / std::numbers::ln2 : 1.0; }

inline constexpr double kAlphaInfinity = std::numeric_limits<double>::infinity();

/// alpha within this distance of 1 is treated as Shannon.
inline constexpr double kAlphaOneBand = 1e-9;

inline bool alpha_is_one(double alpha) { return std::abs(alpha - 1.0) <= kAlphaOneBand; }

inline double entropy(std::span<const double> p, LogBase base = LogBase::two) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h * log_factor(base);
}

/// A concave function phi on the probability simplex, defining the cost
/// C(Q) = sum_z P_Z(z) phi(P_{X|Z}(.|z)). Smaller is better.
class CostFamily {
 public:
  enum class Kind { shannon, infinity, below_one, above_one, custom };
  using Phi = std::function<double(std::span<const double>)>;

  /// The cost whose minimization maximizes the alpha-mutual information.
  static CostFamily alpha_mi(double alpha, std::span<const double> px, LogBase base = LogBase::two) {
    if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
    CostFamily c;
    c.q_ = px.size();
    c.base_ = base;
    c.alpha_ = alpha;
    if (std::isinf(alpha)) {
      c.kind_ = Kind::infinity;
      c.weights_.resize(px.size());
      for (std::size_t i = 0; i < px.size(); ++i) c.weights_[i] = 1.0 / px[i];
    } else if (alpha_is_one(alpha)) {
      c.kind_ = Kind::shannon;
      c.alpha_ = 1.0;
    } else {
      c.kind_ = alpha < 1.0 ? Kind::below_one : Kind::above_one;
      c.weights_.resize(px.size());
      // px^(1 - alpha) through log space
      for (std::size_t i = 0; i < px.size(); ++i) c.weights_[i] = std::exp((1.0 - alpha) * std::log(px[i]));
    }
    return c;
  }

  /// A caller-supplied phi, trusted to be concave. Debug builds probe
  /// midpoint concavity and reject obvious violations.
  static CostFamily custom(std::size_t q, Phi phi, LogBase base = LogBase::two);

  double phi(std::span<const double> dist) const {
    if (dist.size() != q_) throw ValidationError("phi: distribution has wrong dimension");
    for (double v : dist) {
      if (v < -1e-15) throw DomainError("phi: negative probability " + std::to_string(v));
    }
    switch (kind_) {
      case Kind::shannon: {
        double h = 0.0;
        for (double v : dist) {
          if (v > 0.0) h -= v * std::log(v);
        }
        return h * log_factor(base_);
      }
      case Kind::infinity: {
        double best = 0.0;
        for (std::size_t i = 0; i < q_; ++i) best = std::max(best, std::max(dist[i], 0.0) * weights_[i]);
        return -best;
      }
      case Kind::below_one:
      case Kind::above_one: {
        double s = 0.0;
        for (std::size_t i = 0; i < q_; ++i) {
          if (dist[i] > 0.0) s += weights_[i] * std::pow(dist[i], alpha_);
        }
        const double r = std::pow(s, 1.0 / alpha_);
        return kind_ == Kind::below_one ? r : -r;
      }
      case Kind::custom:
        return custom_(dist);
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }
  bool is_alpha() const { return kind_ != Kind::custom; }
  double alpha() const { return alpha_; }
  LogBase log_base() const { return base_; }
  std::size_t q() const { return q_; }

 private:
  Kind kind_ = Kind::shannon;
  double alpha_ = 1.0;
  LogBase base_ = LogBase::two;
  std::size_t q_ = 0;
  std::vector<double> weights_;
  Phi custom_;
};

/// Random point of the simplex: Dirichlet(1,...,1), with some coordinates
/// zeroed on a third of the draws so faces of the simplex get probed too.
inline std::vector<double> random_simplex_point(std::size_t q, Rng& rng) {
  std::vector<double> p(q);
  const bool sparse = rng.below(3) == 0;
  double sum = 0.0;
  for (auto& v : p) {
    v = (sparse && rng.below(2) == 0) ? 0.0 : rng.exponential();
    sum += v;
  }
  if (sum == 0.0) {
    p[rng.below(q)] = 1.0;
    return p;
  }
  for (auto& v : p) v /= sum;
  return p;
}

/// Randomized midpoint-concavity probe: phi((u+v)/2) >= (phi(u)+phi(v))/2 - slack.
inline bool midpoint_concave(const CostFamily& cost, std::size_t probes, std::uint64_t seed, double slack = 1e-12) {
  Rng rng(seed);
  std::vector<double> mid(cost.q());
  for (std::size_t k = 0; k < probes; ++k) {
    const auto u = random_simplex_point(cost.q(), rng);
    const auto v = random_simplex_point(cost.q(), rng);
    for (std::size_t i = 0; i < cost.q(); ++i) mid[i] = 0.5 * (u[i] + v[i]);
    if (cost.phi(mid) < 0.5 * (cost.phi(u) + cost.phi(v)) - slack) return false;
  }
  return true;
}

inline CostFamily CostFamily::custom(std::size_t q, Phi phi, LogBase base) {
  if (q < 1 || !phi) throw ValidationError("custom phi needs a dimension and a callable");
  CostFamily c;
  c.kind_ = Kind::custom;
  c.q_ = q;
  c.base_ = base;
  c.alpha_ = std::numeric_limits<double>::quiet_NaN();
  c.custom_ = std::move(phi);
#ifndef NDEBUG
  if (!midpoint_concave(c, 256, 0x5eed)) throw ValidationError("custom phi failed the midpoint concavity probe");
#endif
  return c;
}

/// mass * phi(joint / mass) for an unnormalized joint column; 0 for an empty cell.
inline double cell_cost(std::span<const double> joint, const CostFamily& cost) {
  double mass = 0.0;
  for (double v : joint) mass += v;
  if (!(mass > 0.0)) return 0.0;
  std::array<double, 64> small{};
  std::vector<double> big;
  std::span<double> u;
  if (joint.size() <= small.size()) {
    u = std::span<double>(small.data(), joint.size());
  } else {
    big.resize(joint.size());
    u = big;
  }
  for (std::size_t i = 0; i < joint.size(); ++i) u[i] = joint[i] / mass;
  return mass * cost.phi(u);
}

/// Segment cost w(l, r) over a fixed output labelling, from joint prefix sums.
///
/// Indices are 1-based and inclusive, l <= r. The optional table caches every
/// w(l, r) (O(N^2) memory); cached and lazy evaluation return identical bits.
///
/// For alpha = infinity, w(l, r) = -max_x P(y in l..r | x), evaluated on
/// conditional CDFs snapped to a 2^-44 fixed-point grid. Differences and DP
/// sums are then exact, so segment costs telescope bitwise and mathematically
/// tied candidates compare equal in every engine.
class SegmentCostView {
 public:
  SegmentCostView(const Channel& ch, CostFamily cost) : prefix_(joint_prefix(ch)), cost_(std::move(cost)) {
    if (cost_.q() != ch.q()) throw ValidationError("cost family dimension differs from channel input size");
    degenerate_ = posterior_geometry(ch).degenerate;
    if (cost_.kind() == CostFamily::Kind::infinity) build_grid(ch);
  }

  std::size_t n() const { return prefix_.n(); }
  std::size_t q() const { return prefix_.q(); }
  const JointPrefix& prefix() const { return prefix_; }
  const CostFamily& cost() const { return cost_; }
  bool degenerate() const { return degenerate_; }
  bool cached() const { return table_ != nullptr; }

  double w(std::size_t l, std::size_t r) const {
    if (table_) return (*table_)[(l - 1) * n() + (r - 1)];
    return compute(l, r);
  }

  /// Sum of P_Y over outputs l..r.
  double mass(std::size_t l, std::size_t r) const {
    double a = 0.0;
    for (std::size_t i = 0; i < q(); ++i) a += prefix_(i, r) - prefix_(i, l - 1);
    return a;
  }

  /// A copy with the full w table filled in.
  SegmentCostView with_cache() const {
    SegmentCostView out = *this;
    auto table = std::make_shared<std::vector<double>>(n() * n(), 0.0);
    for (std::size_t l = 1; l <= n(); ++l) {
      for (std::size_t r = l; r <= n(); ++r) (*table)[(l - 1) * n() + (r - 1)] = compute(l, r);
    }
    out.table_ = std::move(table);
    return out;
  }

 private:
  static constexpr double kGridScale = 17592186044416.0;  // 2^44

  void build_grid(const Channel& ch) {
    const std::size_t stride = n() + 1;
    grid_.assign(q() * stride, 0);
    for (std::size_t i = 0; i < q(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n(); ++j) {
        acc += ch.pyx(i, j);
        grid_[i * stride + j + 1] = std::llround(acc * kGridScale);
      }
    }
  }

  double compute(std::size_t l, std::size_t r) const {
    if (!grid_.empty()) {
      const std::size_t stride = n() + 1;
      std::int64_t best = 0;
      for (std::size_t i = 0; i < q(); ++i) best = std::max(best, grid_[i * stride + r] - grid_[i * stride + l - 1]);
      return -static_cast<double>(best) / kGridScale;
    }
    std::array<double, 64> small{};
    std::vector<double> big;
    std::span<double> b;
    if (q() <= small.size()) {
      b = std::span<double>(small.data(), q());
    } else {
      big.resize(q());
      b = big;
    }
    for (std::size_t i = 0; i < q(); ++i) b[i] = prefix_(i, r) - prefix_(i, l - 1);
    return cell_cost(b, cost_);
  }

  JointPrefix prefix_;
  CostFamily cost_;
  bool degenerate_ = false;
  std::vector<std::int64_t> grid_;  // alpha = infinity only: q x (N+1) fixed-point CDFs
  std::shared_ptr<const std::vector<double>> table_;
};

/// Checks 0 = l_0 < l_1 < ... < l_M = n.
inline void validate_boundaries(const std::vector<std::size_t>& b, std::size_t n) {
  if (b.size() < 2 || b.front() != 0 || b.back() != n) {
    throw ValidationError("boundaries must run from 0 to N=" + std::to_string(n));
  }
  for (std::size_t m = 1; m < b.size(); ++m) {
    if (b[m] <= b[m - 1]) throw ValidationError("boundaries must be strictly increasing at position " + std::to_string(m));
  }
}

/// C(Lambda) = sum_m w(l_{m-1} + 1, l_m).
inline double sdq_cost(const SegmentCostView& view, const std::vector<std::size_t>& boundaries) {
  validate_boundaries(boundaries, view.n());
  double c = 0.0;
  for (std::size_t m = 1; m < boundaries.size(); ++m) c += view.w(boundaries[m - 1] + 1, boundaries[m]);
  return c;
}

/// C(Q) for a general deterministic quantizer.
inline double assignment_cost(const Channel& ch, const CostFamily& cost, const Assignment& a) {
  const Matrix<double> j = joint_xz(ch, a);
  std::vector<double> col(ch.q());
  double c = 0.0;
  for (std::size_t z = 0; z < a.levels; ++z) {
    for (std::size_t i = 0; i < ch.q(); ++i) col[i] = j(i, z);
    c += cell_cost(col, cost);
  }
  return c;
}

/// I_alpha(X; Z) from a q x M joint distribution.
inline double alpha_mi(const Matrix<double>& pxz, double alpha, LogBase base = LogBase::two) {
  if (!(alpha > 0.0)) throw DomainError("alpha-MI needs alpha > 0");
  const std::size_t q = pxz.rows();
  const std::size_t m = pxz.cols();
  std::vector<double> px(q, 0.0), pz(m, 0.0);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t z = 0; z < m; ++z) {
      if (pxz(i, z) < 0.0) throw DomainError("alpha-MI: negative joint probability");
      px[i] += pxz(i, z);
      pz[z] += pxz(i, z);
    }
  }
  const double f = log_factor(base);

  if (alpha_is_one(alpha)) {
    double s = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t z = 0; z < m; ++z) {
        const double p = pxz(i, z);
        if (p > 0.0) s += p * std::log(p / (px[i] * pz[z]));
      }
    }
    return s * f;
  }
  if (std::isinf(alpha)) {
    double s = 0.0;
    for (std::size_t z = 0; z < m; ++z) {
      double best = 0.0;
      for (std::size_t i = 0; i < q; ++i) {
        if (px[i] > 0.0) best = std::max(best, pxz(i, z) / px[i]);
      }
      s += best;
    }
    return std::log(s) * f;
  }
  double s = 0.0;
  for (std::size_t z = 0; z < m; ++z) {
    double inner = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      if (px[i] > 0.0 && pxz(i, z) > 0.0) inner += px[i] * std::pow(pxz(i, z) / px[i], alpha);
    }
    s += std::pow(inner, 1.0 / alpha);
  }
  return alpha / (alpha - 1.0) * std::log(s) * f;
}

/// Maps a minimized alpha-cost C_alpha(Q) to I_alpha(X; Z).
inline double cost_to_alpha_mi(double cost_value, double alpha, double entropy_x, LogBase base = LogBase::two) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  const double f = log_factor(base);
  auto checked_log = [&](double v) {
    if (!(v > 0.0)) throw DomainError("cost value " + std::to_string(cost_value) + " is outside the domain for alpha");
    return std::log(v) * f;
  };
  if (alpha_is_one(alpha)) return entropy_x - cost_value;
  if (std::isinf(alpha)) return checked_log(-cost_value);
  if (alpha < 1.0) return alpha / (alpha - 1.0) * checked_log(cost_value);
  return alpha / (alpha - 1.0) * checked_log(-cost_value);
}

/// I(X;Y) in the requested base.
inline double channel_mi(const Channel& ch, LogBase base = LogBase::two) { return alpha_mi(joint_xy(ch), 1.0, base); }

/// I(X;Y) - I(X;Z).
inline double mi_gap(const Channel& ch, const Assignment& a, LogBase base = LogBase::two) {
  return channel_mi(ch, base) - alpha_mi(joint_xz(ch, a), 1.0, base);
}

}  // namespace sdq

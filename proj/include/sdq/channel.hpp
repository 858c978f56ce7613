// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sdq/error.hpp"
#include "sdq/matrix.hpp"

namespace sdq {

inline constexpr double kProbabilityTol = 1e-12;
inline constexpr double kCollinearTol = 1e-9;
inline constexpr double kDominanceTol = 1e-9;

/// A q-ary input, n-ary output discrete memoryless channel.
///
/// The constructor only checks shapes; probabilistic invariants are checked
/// by validate(). Use make_channel() to get both.
class Channel {
 public:
  Channel() = default;
  Channel(std::vector<double> px, Matrix<double> pyx) : px_(std::move(px)), pyx_(std::move(pyx)) {
    if (px_.size() != pyx_.rows()) {
      throw ValidationError("shape: px has " + std::to_string(px_.size()) + " entries but pyx has " +
                            std::to_string(pyx_.rows()) + " rows");
    }
    py_.assign(pyx_.cols(), 0.0);
    for (std::size_t i = 0; i < q(); ++i) {
      for (std::size_t j = 0; j < n(); ++j) py_[j] += px_[i] * pyx_(i, j);
    }
  }

  std::size_t q() const { return px_.size(); }
  std::size_t n() const { return pyx_.cols(); }

  std::span<const double> px() const { return px_; }
  const Matrix<double>& pyx() const { return pyx_; }
  double pyx(std::size_t i, std::size_t j) const { return pyx_(i, j); }

  /// Output marginal P_Y.
  std::span<const double> py() const { return py_; }

  /// P_{X,Y}(x_i, y_j).
  double joint(std::size_t i, std::size_t j) const { return px_[i] * pyx_(i, j); }

  friend bool operator==(const Channel& a, const Channel& b) {
    return a.px_ == b.px_ && a.pyx_ == b.pyx_;
  }

 private:
  std::vector<double> px_;
  Matrix<double> pyx_;
  std::vector<double> py_;
};

/// Throws ValidationError naming the first violated invariant.
inline void validate(const Channel& ch) {
  auto fail = [](const std::string& what) { throw ValidationError(what); };
  if (ch.q() < 2) fail("input alphabet size q=" + std::to_string(ch.q()) + " < 2");
  if (ch.n() < 2) fail("output alphabet size n=" + std::to_string(ch.n()) + " < 2");

  double px_sum = 0.0;
  for (std::size_t i = 0; i < ch.q(); ++i) {
    const double p = ch.px()[i];
    if (!(p > 0.0)) {
      std::ostringstream os;
      os << "input probability px[" << i << "]=" << p << " is not positive";
      fail(os.str());
    }
    px_sum += p;
  }
  if (std::abs(px_sum - 1.0) > kProbabilityTol) {
    std::ostringstream os;
    os.precision(17);
    os << "px sum " << px_sum << " deviates from 1 by " << std::abs(px_sum - 1.0);
    fail(os.str());
  }

  for (std::size_t i = 0; i < ch.q(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < ch.n(); ++j) {
      const double p = ch.pyx(i, j);
      if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream os;
        os << "transition probability pyx[" << i << "][" << j << "]=" << p << " outside [0,1]";
        fail(os.str());
      }
      row += p;
    }
    if (std::abs(row - 1.0) > kProbabilityTol) {
      std::ostringstream os;
      os.precision(17);
      os << "row sum of pyx[" << i << "] is " << row << ", deviates from 1 by " << std::abs(row - 1.0);
      fail(os.str());
    }
  }

  for (std::size_t j = 0; j < ch.n(); ++j) {
    if (!(ch.py()[j] > 0.0)) fail("zero output mass at output " + std::to_string(j));
  }
}

inline Channel make_channel(std::vector<double> px, Matrix<double> pyx) {
  Channel ch(std::move(px), std::move(pyx));
  validate(ch);
  return ch;
}

inline Channel make_channel(std::vector<double> px, const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.empty() ? 0 : rows.front().size();
  Matrix<double> pyx(rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n) throw ValidationError("shape: pyx rows have different lengths");
    std::copy(rows[i].begin(), rows[i].end(), pyx.row(i).begin());
  }
  return make_channel(std::move(px), std::move(pyx));
}

/// Binary symmetric channel with uniform input.
inline Channel bsc(double crossover) {
  return make_channel({0.5, 0.5}, {{1.0 - crossover, crossover}, {crossover, 1.0 - crossover}});
}

/// s(i, k) = sum_{j<=k} P_{X,Y}(x_i, y_j), with s(i, 0) = 0. Output indices are 1-based.
struct JointPrefix {
  Matrix<double> s;

  std::size_t q() const { return s.rows(); }
  std::size_t n() const { return s.cols() - 1; }
  double operator()(std::size_t i, std::size_t k) const { return s(i, k); }
};

inline JointPrefix joint_prefix(const Channel& ch) {
  JointPrefix p{Matrix<double>(ch.q(), ch.n() + 1, 0.0)};
  for (std::size_t i = 0; i < ch.q(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < ch.n(); ++j) {
      acc += ch.joint(i, j);
      p.s(i, j + 1) = acc;
    }
  }
  return p;
}

/// Posterior points delta_j = P_{X|Y}(.|y_j) and their line structure.
struct PosteriorGeometry {
  Matrix<double> delta;  // n x q
  bool collinear = false;
  bool sequential = false;
  bool degenerate = false;  // every posterior equal
  std::vector<double> t;
  std::vector<double> direction;  // from delta_1 towards the far end of the segment
  std::size_t anchor = 0;          // first output whose posterior differs from delta_1
};

inline Matrix<double> posteriors(const Channel& ch) {
  Matrix<double> delta(ch.n(), ch.q());
  for (std::size_t j = 0; j < ch.n(); ++j) {
    for (std::size_t i = 0; i < ch.q(); ++i) delta(j, i) = ch.joint(i, j) / ch.py()[j];
  }
  return delta;
}

/// Collinearity test with relative L-infinity tolerance.
///
/// t is the least-squares line parameter of each posterior, rescaled so its
/// largest value is 1. When delta_1 is an endpoint of the segment this is the
/// parameterization delta_j = delta_1 + t_j (delta_far - delta_1).
inline PosteriorGeometry posterior_geometry(const Channel& ch, double tol = kCollinearTol) {
  PosteriorGeometry g;
  g.delta = posteriors(ch);
  const std::size_t n = ch.n();
  const std::size_t q = ch.q();

  double extent = 0.0;
  std::optional<std::size_t> anchor;
  for (std::size_t j = 1; j < n; ++j) {
    double dev = 0.0;
    for (std::size_t i = 0; i < q; ++i) dev = std::max(dev, std::abs(g.delta(j, i) - g.delta(0, i)));
    extent = std::max(extent, dev);
    if (!anchor && dev > tol) anchor = j;
  }
  if (!anchor) {
    g.collinear = g.sequential = g.degenerate = true;
    g.t.assign(n, 0.0);
    g.direction.assign(q, 0.0);
    return g;
  }
  g.anchor = *anchor;

  std::vector<double> d(q);
  double dd = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    d[i] = g.delta(g.anchor, i) - g.delta(0, i);
    dd += d[i] * d[i];
  }

  std::vector<double> raw(n, 0.0);
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double dot = 0.0;
    for (std::size_t i = 0; i < q; ++i) dot += (g.delta(j, i) - g.delta(0, i)) * d[i];
    raw[j] = dot / dd;
    for (std::size_t i = 0; i < q; ++i) {
      worst = std::max(worst, std::abs(g.delta(j, i) - (g.delta(0, i) + raw[j] * d[i])));
    }
  }
  g.collinear = worst <= tol * extent;

  const double scale = *std::max_element(raw.begin(), raw.end());  // >= 1 (anchor)
  g.t.resize(n);
  for (std::size_t j = 0; j < n; ++j) g.t[j] = raw[j] / scale;
  g.direction.resize(q);
  for (std::size_t i = 0; i < q; ++i) g.direction[i] = d[i] * scale;

  if (g.collinear) {
    bool monotone = std::abs(g.t.front()) <= tol && std::abs(g.t.back() - 1.0) <= tol;
    for (std::size_t j = 1; monotone && j < n; ++j) monotone = g.t[j] >= g.t[j - 1] - tol;
    g.sequential = monotone;
  }
  return g;
}

/// A relabelling: position k of the new alphabet holds old symbol perm[k].
struct Labeling {
  std::vector<std::size_t> perm;

  static Labeling identity(std::size_t n) {
    Labeling l;
    l.perm.resize(n);
    std::iota(l.perm.begin(), l.perm.end(), std::size_t{0});
    return l;
  }

  std::size_t size() const { return perm.size(); }

  bool is_bijection() const {
    std::vector<bool> seen(perm.size(), false);
    for (std::size_t p : perm) {
      if (p >= perm.size() || seen[p]) return false;
      seen[p] = true;
    }
    return true;
  }

  bool is_identity() const {
    for (std::size_t k = 0; k < perm.size(); ++k) {
      if (perm[k] != k) return false;
    }
    return true;
  }

  Labeling inverse() const {
    Labeling inv;
    inv.perm.resize(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) inv.perm[perm[k]] = k;
    return inv;
  }

  friend bool operator==(const Labeling&, const Labeling&) = default;
};

inline Channel relabel_outputs(const Channel& ch, const Labeling& lab) {
  if (lab.size() != ch.n() || !lab.is_bijection()) throw ValidationError("output labeling is not a permutation of [n]");
  Matrix<double> pyx(ch.q(), ch.n());
  for (std::size_t i = 0; i < ch.q(); ++i) {
    for (std::size_t k = 0; k < ch.n(); ++k) pyx(i, k) = ch.pyx(i, lab.perm[k]);
  }
  return Channel(std::vector<double>(ch.px().begin(), ch.px().end()), std::move(pyx));
}

inline Channel relabel_inputs(const Channel& ch, const Labeling& lab) {
  if (lab.size() != ch.q() || !lab.is_bijection()) throw ValidationError("input labeling is not a permutation of [q]");
  std::vector<double> px(ch.q());
  Matrix<double> pyx(ch.q(), ch.n());
  for (std::size_t k = 0; k < ch.q(); ++k) {
    px[k] = ch.px()[lab.perm[k]];
    std::copy(ch.pyx().row(lab.perm[k]).begin(), ch.pyx().row(lab.perm[k]).end(), pyx.row(k).begin());
  }
  return Channel(std::move(px), std::move(pyx));
}

/// Sorts outputs by ascending line parameter so the posteriors become sequential.
inline std::pair<Channel, Labeling> relabel_outputs_sequential(const Channel& ch, double tol = kCollinearTol) {
  const PosteriorGeometry g = posterior_geometry(ch, tol);
  if (!g.collinear) throw ValidationError("posteriors are not collinear; no sequential output labeling exists");
  Labeling lab = Labeling::identity(ch.n());
  std::stable_sort(lab.perm.begin(), lab.perm.end(), [&](std::size_t a, std::size_t b) { return g.t[a] < g.t[b]; });
  return {relabel_outputs(ch, lab), lab};
}

namespace detail {

// a_j b_k >= a_k b_j within a relative tolerance.
inline bool ordered_pair(double aj, double ak, double bj, double bk, double tol) {
  const double lhs = aj * bk;
  const double rhs = ak * bj;
  return lhs >= rhs - tol * std::max(lhs, rhs);
}

// Full a >= b test over all j < k. For strictly positive rows the adjacent
// form is equivalent and O(n).
inline std::optional<std::pair<std::size_t, std::size_t>> row_dominance_violation(std::span<const double> a,
                                                                                 std::span<const double> b,
                                                                                 double tol, bool strict) {
  const std::size_t n = a.size();
  const bool positive = std::all_of(a.begin(), a.end(), [](double v) { return v > 0.0; }) &&
                        std::all_of(b.begin(), b.end(), [](double v) { return v > 0.0; });
  if (positive && !strict) {
    for (std::size_t j = 0; j + 1 < n; ++j) {
      if (!ordered_pair(a[j], a[j + 1], b[j], b[j + 1], tol)) return std::pair{j, j + 1};
    }
    return std::nullopt;
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      if (!ordered_pair(a[j], a[k], b[j], b[k], tol)) return std::pair{j, k};
    }
  }
  return std::nullopt;
}

}  // namespace detail

enum class DominanceMode { adjacent, strict };

struct DominanceReport {
  bool holds = true;
  /// (i, i', j, j') with P(y_j|x_i) P(y_j'|x_i') < P(y_j'|x_i) P(y_j|x_i').
  std::optional<std::array<std::size_t, 4>> violation;
};

/// Likelihood-ratio ordering of the rows of P_{Y|X}.
///
/// Adjacent mode checks consecutive inputs and consecutive outputs only;
/// strict mode scans every quadruple i < i', j < j'. The tolerance is
/// relative to the larger of the two products.
inline DominanceReport check_dominance(const Channel& ch, double tol = kDominanceTol,
                                       DominanceMode mode = DominanceMode::adjacent) {
  DominanceReport rep;
  const auto& p = ch.pyx();
  if (mode == DominanceMode::adjacent) {
    for (std::size_t i = 0; i + 1 < ch.q(); ++i) {
      for (std::size_t j = 0; j + 1 < ch.n(); ++j) {
        if (!detail::ordered_pair(p(i, j), p(i, j + 1), p(i + 1, j), p(i + 1, j + 1), tol)) {
          rep.holds = false;
          rep.violation = std::array<std::size_t, 4>{i, i + 1, j, j + 1};
          return rep;
        }
      }
    }
    return rep;
  }
  for (std::size_t i = 0; i < ch.q(); ++i) {
    for (std::size_t k = i + 1; k < ch.q(); ++k) {
      if (auto v = detail::row_dominance_violation(p.row(i), p.row(k), tol, true)) {
        rep.holds = false;
        rep.violation = std::array<std::size_t, 4>{i, k, v->first, v->second};
        return rep;
      }
    }
  }
  return rep;
}

struct InputRelabelResult {
  Channel channel;
  Labeling labeling;
  bool satisfied = false;
};

/// Permutes inputs so that P_{Y|X}(.|x_i) dominates P_{Y|X}(.|x_i') for i < i'.
///
/// Collinear channels use the ordering of d_i / P_{X|Y}(x_i|y_1) (inputs with
/// P_{X|Y}(x_i|y_1) = 0 last); otherwise inputs are picked greedily, each one
/// dominating every input not yet placed. satisfied reports whether the result
/// passes a strict dominance scan.
inline InputRelabelResult relabel_inputs_dominant(const Channel& ch, double tol = kDominanceTol) {
  const std::size_t q = ch.q();
  Labeling lab = Labeling::identity(q);
  const PosteriorGeometry g = posterior_geometry(ch, kCollinearTol);

  if (g.collinear && !g.degenerate) {
    auto key = [&](std::size_t i) {
      const double head = g.delta(0, i);
      return head > 0.0 ? g.direction[i] / head : std::numeric_limits<double>::infinity();
    };
    std::stable_sort(lab.perm.begin(), lab.perm.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  } else if (!g.degenerate) {
    std::vector<std::size_t> remaining = lab.perm;
    lab.perm.clear();
    while (!remaining.empty()) {
      auto it = std::find_if(remaining.begin(), remaining.end(), [&](std::size_t a) {
        return std::all_of(remaining.begin(), remaining.end(), [&](std::size_t b) {
          return a == b || !detail::row_dominance_violation(ch.pyx().row(a), ch.pyx().row(b), tol, false);
        });
      });
      if (it == remaining.end()) {
        lab.perm.insert(lab.perm.end(), remaining.begin(), remaining.end());
        break;
      }
      lab.perm.push_back(*it);
      remaining.erase(it);
    }
  }

  Channel relabelled = relabel_inputs(ch, lab);
  const bool ok = check_dominance(relabelled, tol, DominanceMode::strict).holds;
  return {std::move(relabelled), std::move(lab), ok};
}

}  // namespace sdq

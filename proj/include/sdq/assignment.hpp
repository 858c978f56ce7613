// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "sdq/channel.hpp"
#include "sdq/error.hpp"
#include "sdq/matrix.hpp"

namespace sdq {

/// A deterministic quantizer Q: Y -> Z as a label per output, labels in [0, levels).
struct Assignment {
  std::vector<std::size_t> labels;
  std::size_t levels = 0;

  std::size_t n() const { return labels.size(); }

  /// Boundaries {0 = l_0 < l_1 < ... < l_M = N}; output j (0-based) goes to the
  /// cell m with l_m < j + 1 <= l_{m+1}.
  static Assignment from_boundaries(const std::vector<std::size_t>& boundaries) {
    if (boundaries.size() < 2 || boundaries.front() != 0) throw ValidationError("boundaries must start at 0");
    Assignment a;
    a.levels = boundaries.size() - 1;
    a.labels.resize(boundaries.back());
    for (std::size_t m = 0; m + 1 < boundaries.size(); ++m) {
      if (boundaries[m + 1] <= boundaries[m]) throw ValidationError("boundaries must be strictly increasing");
      for (std::size_t j = boundaries[m]; j < boundaries[m + 1]; ++j) a.labels[j] = m;
    }
    return a;
  }

  static Assignment identity(std::size_t n) {
    Assignment a;
    a.levels = n;
    a.labels.resize(n);
    for (std::size_t j = 0; j < n; ++j) a.labels[j] = j;
    return a;
  }

  bool in_range() const {
    return std::all_of(labels.begin(), labels.end(), [&](std::size_t z) { return z < levels; });
  }

  bool surjective() const {
    std::vector<bool> used(levels, false);
    for (std::size_t z : labels) {
      if (z >= levels) return false;
      used[z] = true;
    }
    return std::all_of(used.begin(), used.end(), [](bool b) { return b; });
  }

  /// Preimage of each label, members in ascending output order.
  std::vector<std::vector<std::size_t>> preimages() const {
    std::vector<std::vector<std::size_t>> out(levels);
    for (std::size_t j = 0; j < labels.size(); ++j) out[labels[j]].push_back(j);
    return out;
  }

  /// True when every preimage is a contiguous run of output indices.
  bool is_sequential() const {
    for (const auto& cell : preimages()) {
      if (!cell.empty() && cell.back() - cell.front() + 1 != cell.size()) return false;
    }
    return true;
  }

  /// Renumbers labels by ascending smallest member; drops nothing.
  Assignment canonical() const {
    std::vector<std::size_t> remap(levels, std::numeric_limits<std::size_t>::max());
    std::size_t next = 0;
    Assignment out;
    out.levels = levels;
    out.labels.resize(labels.size());
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (remap[labels[j]] == std::numeric_limits<std::size_t>::max()) remap[labels[j]] = next++;
      out.labels[j] = remap[labels[j]];
    }
    return out;
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// P_{X,Z} as a q x M matrix.
inline Matrix<double> joint_xz(const Channel& ch, const Assignment& a) {
  if (a.n() != ch.n()) throw ValidationError("assignment length differs from channel output count");
  if (!a.in_range()) throw ValidationError("assignment label out of range");
  Matrix<double> out(ch.q(), a.levels, 0.0);
  for (std::size_t j = 0; j < ch.n(); ++j) {
    for (std::size_t i = 0; i < ch.q(); ++i) out(i, a.labels[j]) += ch.joint(i, j);
  }
  return out;
}

/// P_{X,Y} as a q x N matrix.
inline Matrix<double> joint_xy(const Channel& ch) {
  Matrix<double> out(ch.q(), ch.n());
  for (std::size_t i = 0; i < ch.q(); ++i) {
    for (std::size_t j = 0; j < ch.n(); ++j) out(i, j) = ch.joint(i, j);
  }
  return out;
}

}  // namespace sdq

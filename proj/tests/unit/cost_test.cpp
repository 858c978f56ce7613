// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

namespace sdq {
namespace {

using testing::naive_assignment_cost;
using testing::naive_phi;
using testing::naive_w;
using testing::rel_close;

const double kAlphas[] = {0.5, 1.0, 2.0, kAlphaInfinity};

double binary_entropy(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

// I_alpha(X; Z) from the three-case definition over P_{Z|X}.
double naive_alpha_mi(const Matrix<double>& pxz, double alpha) {
  const std::size_t q = pxz.rows(), m = pxz.cols();
  std::vector<double> px(q, 0.0), pz(m, 0.0);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t z = 0; z < m; ++z) {
      px[i] += pxz(i, z);
      pz[z] += pxz(i, z);
    }
  }
  if (alpha == 1.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t z = 0; z < m; ++z) {
        if (pxz(i, z) > 0) s += pxz(i, z) * std::log2(pxz(i, z) / (px[i] * pz[z]));
      }
    }
    return s;
  }
  if (std::isinf(alpha)) {
    double s = 0.0;
    for (std::size_t z = 0; z < m; ++z) {
      double best = 0.0;
      for (std::size_t i = 0; i < q; ++i) best = std::max(best, pxz(i, z) / px[i]);
      s += best;
    }
    return std::log2(s);
  }
  double s = 0.0;
  for (std::size_t z = 0; z < m; ++z) {
    double inner = 0.0;
    for (std::size_t i = 0; i < q; ++i) inner += px[i] * std::pow(pxz(i, z) / px[i], alpha);
    s += std::pow(inner, 1.0 / alpha);
  }
  return alpha / (alpha - 1.0) * std::log2(s);
}

Assignment random_assignment(std::size_t n, std::size_t levels, Rng& rng) {
  Assignment a;
  a.levels = levels;
  a.labels.resize(n);
  for (std::size_t j = 0; j < n; ++j) a.labels[j] = j < levels ? j : rng.below(levels);
  rng.shuffle(std::span<std::size_t>(a.labels));
  return a;
}

TEST(Phi, WorkedValues) {
  const std::vector<double> half{0.5, 0.5};
  EXPECT_DOUBLE_EQ(CostFamily::alpha_mi(1.0, half).phi(half), 1.0);
  EXPECT_DOUBLE_EQ(CostFamily::alpha_mi(kAlphaInfinity, half).phi(std::vector<double>{1.0, 0.0}), -2.0);
  EXPECT_NEAR(CostFamily::alpha_mi(0.5, half).phi(half), 1.0, 1e-15);
  EXPECT_NEAR(CostFamily::alpha_mi(1.0, half, LogBase::e).phi(half), std::log(2.0), 1e-15);
}

TEST(Phi, RejectsNegativeEntries) {
  const std::vector<double> half{0.5, 0.5};
  const CostFamily c = CostFamily::alpha_mi(2.0, half);
  EXPECT_THROW(c.phi(std::vector<double>{1.1, -0.1}), DomainError);
  EXPECT_NO_THROW(c.phi(std::vector<double>{1.0 + 1e-16, -1e-16}));
  EXPECT_THROW(CostFamily::alpha_mi(0.0, half), ValidationError);
}

TEST(Phi, NearOneRoutesToShannon) {
  const std::vector<double> px{0.3, 0.7};
  EXPECT_EQ(CostFamily::alpha_mi(1.0 + 1e-10, px).kind(), CostFamily::Kind::shannon);
  EXPECT_EQ(CostFamily::alpha_mi(1.0 + 1e-6, px).kind(), CostFamily::Kind::above_one);
  EXPECT_EQ(CostFamily::alpha_mi(0.999, px).kind(), CostFamily::Kind::below_one);
}

TEST(Phi, MatchesDefiningFormula) {
  Rng rng(12);
  for (double alpha : {0.25, 0.5, 1.0, 1.5, 2.0, 7.0, kAlphaInfinity}) {
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t q = 2 + rng.below(5);
      const auto px = random_simplex_point(q, rng);
      if (std::any_of(px.begin(), px.end(), [](double v) { return v <= 0.0; })) continue;
      const auto d = random_simplex_point(q, rng);
      EXPECT_TRUE(rel_close(CostFamily::alpha_mi(alpha, px).phi(d), naive_phi(d, px, alpha), 1e-12));
    }
  }
}

TEST(Phi, MidpointConcaveForEveryAlpha) {
  Rng rng(1);
  for (double alpha : {0.1, 0.5, 1.0, 2.0, 10.0, kAlphaInfinity}) {
    for (std::size_t q : {2u, 3u, 5u}) {
      std::vector<double> px = random_simplex_point(q, rng);
      for (auto& v : px) v = 0.5 * v + 0.5 / static_cast<double>(q);
      EXPECT_TRUE(midpoint_concave(CostFamily::alpha_mi(alpha, px), 1000, 77)) << alpha << " " << q;
    }
  }
}

TEST(Phi, CustomConcaveAcceptedConvexRejectedInDebug) {
  auto gini = [](std::span<const double> p) {
    double s = 1.0;
    for (double v : p) s -= v * v;
    return s;
  };
  const CostFamily c = CostFamily::custom(3, gini);
  EXPECT_NEAR(c.phi(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}), 2.0 / 3, 1e-15);
  EXPECT_TRUE(midpoint_concave(c, 500, 3));
  auto convex = [&](std::span<const double> p) { return -gini(p); };
#ifndef NDEBUG
  EXPECT_THROW(CostFamily::custom(3, convex), ValidationError);
#else
  EXPECT_FALSE(midpoint_concave(CostFamily::custom(3, convex), 500, 3));
#endif
}

TEST(SegmentCost, BscValues) {
  const Channel ch = bsc(0.1);
  const SegmentCostView view(ch, CostFamily::alpha_mi(1.0, ch.px()));
  EXPECT_NEAR(view.w(1, 2), 1.0, 1e-15);
  EXPECT_NEAR(view.w(1, 1), 0.5 * binary_entropy(0.9), 1e-15);
  EXPECT_NEAR(sdq_cost(view, {0, 1, 2}), binary_entropy(0.9), 1e-15);
  EXPECT_NEAR(binary_entropy(0.9), 0.468996, 1e-6);
  EXPECT_NEAR(sdq_cost(view, {0, 2}), view.w(1, 2), 0.0);
}

TEST(SegmentCost, MatchesNaiveSummation) {
  Rng rng(33);
  for (double alpha : kAlphas) {
    for (int trial = 0; trial < 100; ++trial) {
      const Channel ch = random_channel(3, 6, rng, trial % 2 == 0);
      const SegmentCostView view(ch, CostFamily::alpha_mi(alpha, ch.px()));
      const std::size_t l = 1 + rng.below(6);
      const std::size_t r = l + rng.below(7 - l);
      EXPECT_TRUE(rel_close(view.w(l, r), naive_w(ch, l, r, alpha), 1e-12)) << alpha << " " << l << " " << r;
    }
  }
}

TEST(SegmentCost, SingletonIsMassTimesPhiOfPosterior) {
  Rng rng(4);
  const Channel ch = random_channel(4, 7, rng, false);
  const CostFamily cost = CostFamily::alpha_mi(2.0, ch.px());
  const SegmentCostView view(ch, cost);
  const Matrix<double> delta = posteriors(ch);
  for (std::size_t j = 1; j <= ch.n(); ++j) {
    std::vector<double> d(delta.row(j - 1).begin(), delta.row(j - 1).end());
    EXPECT_TRUE(rel_close(view.w(j, j), ch.py()[j - 1] * cost.phi(d), 1e-13));
  }
}

TEST(SegmentCost, RefinementNeverRaisesCost) {
  Rng rng(17);
  for (double alpha : kAlphas) {
    for (int trial = 0; trial < 40; ++trial) {
      const Channel ch = random_channel(2 + rng.below(3), 3 + rng.below(10), rng, false);
      const SegmentCostView view(ch, CostFamily::alpha_mi(alpha, ch.px()));
      const std::size_t n = ch.n();
      for (std::size_t l = 1; l <= n; ++l) {
        double singles = 0.0;
        for (std::size_t r = l; r <= n; ++r) {
          singles += view.w(r, r);
          EXPECT_GE(view.w(l, r), singles - 1e-12);
          for (std::size_t k = l; k < r; ++k) EXPECT_GE(view.w(l, r), view.w(l, k) + view.w(k + 1, r) - 1e-12);
        }
      }
    }
  }
}

TEST(SegmentCost, CacheIsBitwiseIdentical) {
  Rng rng(5);
  const Channel ch = random_channel(3, 20, rng);
  const SegmentCostView lazy(ch, CostFamily::alpha_mi(0.5, ch.px()));
  const SegmentCostView cached = lazy.with_cache();
  EXPECT_TRUE(cached.cached());
  EXPECT_FALSE(lazy.cached());
  for (std::size_t l = 1; l <= 20; ++l) {
    for (std::size_t r = l; r <= 20; ++r) EXPECT_EQ(lazy.w(l, r), cached.w(l, r));
  }
}

TEST(SdqCost, IdentityAndSingleCell) {
  Rng rng(6);
  const Channel ch = random_channel(3, 5, rng, false);
  const CostFamily cost = CostFamily::alpha_mi(1.0, ch.px());
  const SegmentCostView view(ch, cost);
  double singles = 0.0;
  for (std::size_t j = 1; j <= 5; ++j) singles += view.w(j, j);
  EXPECT_NEAR(sdq_cost(view, {0, 1, 2, 3, 4, 5}), singles, 1e-15);
  EXPECT_EQ(sdq_cost(view, {0, 5}), view.w(1, 5));
  EXPECT_THROW(sdq_cost(view, {0, 3, 3, 5}), ValidationError);
  EXPECT_THROW(sdq_cost(view, {0, 3, 4}), ValidationError);
}

TEST(AlphaMi, WorkedValues) {
  Matrix<double> product(2, 3);
  const double px[] = {0.3, 0.7}, pz[] = {0.2, 0.5, 0.3};
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t z = 0; z < 3; ++z) product(i, z) = px[i] * pz[z];
  }
  EXPECT_NEAR(alpha_mi(product, 1.0), 0.0, 1e-15);
  Matrix<double> identity(2, 2, 0.0);
  identity(0, 0) = identity(1, 1) = 0.5;
  EXPECT_NEAR(alpha_mi(identity, 1.0), 1.0, 1e-15);
  EXPECT_THROW(alpha_mi(identity, 0.0), DomainError);
}

TEST(AlphaMi, MatchesDefinition) {
  Rng rng(7);
  for (double alpha : {0.5, 1.0, 2.0, 3.5, kAlphaInfinity}) {
    for (int trial = 0; trial < 100; ++trial) {
      Matrix<double> j(2, 3);
      const auto flat = random_simplex_point(6, rng);
      for (std::size_t k = 0; k < 6; ++k) j(k / 3, k % 3) = flat[k] * 0.9 + 0.1 / 6;
      EXPECT_TRUE(rel_close(alpha_mi(j, alpha), naive_alpha_mi(j, alpha), 1e-12));
    }
  }
}

TEST(CostTransform, WorkedValues) {
  EXPECT_NEAR(cost_to_alpha_mi(0.468996, 1.0, 1.0), 0.531004, 1e-12);
  EXPECT_NEAR(cost_to_alpha_mi(-1.0, kAlphaInfinity, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(cost_to_alpha_mi(1.0, 0.5, 1.0), 0.0, 1e-15);
  EXPECT_THROW(cost_to_alpha_mi(0.0, kAlphaInfinity, 1.0), DomainError);
  EXPECT_THROW(cost_to_alpha_mi(-0.5, 0.5, 1.0), DomainError);
  EXPECT_THROW(cost_to_alpha_mi(0.5, 2.0, 1.0), DomainError);
}

TEST(CostTransform, AgreesWithDirectAlphaMi) {
  Rng rng(8);
  for (double alpha : kAlphas) {
    for (int trial = 0; trial < 250; ++trial) {
      const std::size_t q = 2 + rng.below(3);
      const std::size_t n = 2 + rng.below(8);
      const Channel ch = random_channel(q, n, rng, trial % 3 == 0);
      const Assignment a = random_assignment(n, 1 + rng.below(n), rng);
      const CostFamily cost = CostFamily::alpha_mi(alpha, ch.px());
      const double c = assignment_cost(ch, cost, a);
      EXPECT_TRUE(rel_close(c, naive_assignment_cost(ch, a, alpha), 1e-12));
      const double via_cost = cost_to_alpha_mi(c, alpha, entropy(ch.px()));
      EXPECT_TRUE(rel_close(via_cost, alpha_mi(joint_xz(ch, a), alpha), 1e-9)) << alpha;
    }
  }
}

TEST(MiGap, Endpoints) {
  Rng rng(9);
  const Channel ch = random_channel(3, 6, rng, false);
  EXPECT_NEAR(mi_gap(ch, Assignment::identity(6)), 0.0, 1e-15);
  Assignment one;
  one.levels = 1;
  one.labels.assign(6, 0);
  EXPECT_NEAR(mi_gap(ch, one), channel_mi(ch), 1e-15);
  EXPECT_NEAR(mi_gap(bsc(0.1), Assignment::identity(2)), 0.0, 1e-15);
  EXPECT_NEAR(channel_mi(bsc(0.1)), 1.0 - binary_entropy(0.9), 1e-15);
}

TEST(MiGap, NonNegativeByDataProcessing) {
  Rng rng(10);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(12);
    const Channel ch = random_channel(2 + rng.below(4), n, rng, false);
    const Assignment a = random_assignment(n, 1 + rng.below(n), rng);
    EXPECT_GE(mi_gap(ch, a), -1e-12);
    EXPECT_NEAR(mi_gap(ch, a), testing::naive_mi(ch, Assignment::identity(n)) - testing::naive_mi(ch, a), 1e-12);
  }
}

}  // namespace
}  // namespace sdq

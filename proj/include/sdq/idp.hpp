// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdq/assignment.hpp"
#include "sdq/channel.hpp"
#include "sdq/cost.hpp"
#include "sdq/dp.hpp"
#include "sdq/error.hpp"
#include "sdq/rng.hpp"

namespace sdq {

enum class OrderMode { stable, random };

/// Output labeling under which each preimage of q occupies a contiguous block.
///
/// Stable mode orders blocks by smallest member and keeps members ascending.
/// Random mode draws both the block order and the order inside each block.
inline Labeling relabel_for_incumbent(const Assignment& q, OrderMode mode, Rng* rng = nullptr) {
  if (!q.surjective()) throw ValidationError("incumbent quantizer is not surjective onto its levels");
  auto cells = q.preimages();
  std::vector<std::size_t> order(cells.size());
  for (std::size_t z = 0; z < order.size(); ++z) order[z] = z;
  if (mode == OrderMode::stable) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cells[a].front() < cells[b].front(); });
  } else {
    if (!rng) throw ValidationError("random relabelling needs a generator");
    rng->shuffle(std::span<std::size_t>(order));
    for (auto& cell : cells) rng->shuffle(std::span<std::size_t>(cell));
  }
  Labeling lab;
  lab.perm.reserve(q.n());
  for (std::size_t z : order) lab.perm.insert(lab.perm.end(), cells[z].begin(), cells[z].end());
  return lab;
}

enum class IdpStop { converged, max_iterations };

struct IdpState {
  std::size_t iteration = 0;
  Assignment incumbent;
  Labeling labeling;            // used in the last iteration
  std::vector<double> costs;    // c_0 (initial quantizer), c_1, ...
  IdpStop stop = IdpStop::max_iterations;
  std::size_t qi_fallbacks = 0;  // iterations where a QI engine was requested but the scan failed
};

struct IdpOptions {
  std::size_t max_iterations = 50;  // T_m
  OrderMode order = OrderMode::stable;
  std::uint64_t seed = 1;
  Engine engine = Engine::standard;
  double stop_tol = 1e-12;
};

struct IdpResult {
  Assignment assignment;
  IdpState state;
};

/// Iterative DP: relabel outputs so the incumbent is sequential, then replace
/// it with the optimal SDQ for that labelling. Costs never increase.
///
/// Stable mode stops once an iteration improves by less than stop_tol; random
/// mode always runs max_iterations. Engines other than the standard one are
/// used only when a QI scan on the relabelled channel passes.
inline IdpResult idp(const Channel& ch, const CostFamily& cost, std::size_t levels, const Assignment& initial,
                     const IdpOptions& opts = {}) {
  if (opts.max_iterations < 1) throw ValidationError("idp needs at least one iteration");
  if (initial.n() != ch.n() || initial.levels != levels) throw ValidationError("initial quantizer does not match N and M");
  if (!initial.surjective()) throw ValidationError("initial quantizer is not surjective");

  IdpResult out;
  IdpState& st = out.state;
  st.incumbent = initial;
  st.costs.push_back(assignment_cost(ch, cost, initial));
  Rng rng(opts.seed);

  for (std::size_t t = 1; t <= opts.max_iterations; ++t) {
    st.iteration = t;
    st.labeling = relabel_for_incumbent(st.incumbent, opts.order, &rng);
    const Channel relabelled = relabel_outputs(ch, st.labeling);
    const SegmentCostView view(relabelled, cost);

    SdqSolution sol;
    if (opts.engine == Engine::standard) {
      sol = dp_standard(view, levels);
    } else {
      QiReport qi = check_qi(view);
      if (qi.holds) {
        sol = run_engine(opts.engine, view, levels, QiBasis::from(qi));
      } else {
        ++st.qi_fallbacks;
        sol = dp_standard(view, levels);
      }
    }

    const Assignment sequential = sol.assignment();
    Assignment next;
    next.levels = levels;
    next.labels.assign(ch.n(), 0);
    for (std::size_t k = 0; k < ch.n(); ++k) next.labels[st.labeling.perm[k]] = sequential.labels[k];

    // The relabelled incumbent is feasible for the DP, so c <= before up to rounding.
    const double before = st.costs.back();
    const double c = assignment_cost(ch, cost, next);
    st.incumbent = std::move(next);
    st.costs.push_back(c);
    if (opts.order == OrderMode::stable && before - c < opts.stop_tol) {
      st.stop = IdpStop::converged;
      break;
    }
  }
  out.assignment = st.incumbent;
  return out;
}

}  // namespace sdq

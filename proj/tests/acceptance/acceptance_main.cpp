// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Usage: acceptance [--only K]... [--regen-fixtures]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

namespace {

using namespace sdq;
using testing::rel_close;

struct Verdict {
  bool pass = true;
  std::string detail;
};

const std::vector<double> kAlphas{0.5, 1.0, 2.0, kAlphaInfinity};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

Channel pam(std::size_t q, double sigma, std::size_t n) { return discretize_pam(PamSpec::standard(q, sigma, n)).channel; }

template <class F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

bool regen_fixtures = false;

// 1. Standard DP against the exhaustive SDQ oracle.
Verdict oracle_equivalence() {
  Rng rng(101);
  std::size_t compared = 0, bad = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t q = 2 + rng.below(3);
    const std::size_t n = 3 + rng.below(6);
    const std::size_t levels = 2 + rng.below(n - 2);
    const Channel ch = random_channel(q, n, rng, trial % 2 == 0);
    for (double alpha : kAlphas) {
      const SegmentCostView view(ch, CostFamily::alpha_mi(alpha, ch.px()));
      const double e = rel_err(dp_standard(view, levels).cost, exhaustive_sdq(view, levels).best_cost);
      worst = std::max(worst, e);
      bad += e > 1e-12;
      ++compared;
    }
  }
  return {bad == 0, std::to_string(compared) + " (channel, alpha) pairs on 1000 channels, " + std::to_string(bad) +
                        " mismatches, max rel err " + fmt("%.2e", worst)};
}

// 2. Yao and SMAWK engines against the standard DP wherever the QI scan passes.
Verdict engine_agreement() {
  struct Instance {
    Channel ch;
    std::string tag;
  };
  std::vector<Instance> instances;
  Rng rng(202);
  for (int k = 0; k < 150; ++k) {
    instances.push_back({random_sequential_channel(2 + rng.below(5), 4 + rng.below(253), rng), "sequential"});
  }
  for (std::size_t q : {2u, 4u, 8u}) {
    for (std::size_t n : {16u, 64u, 128u, 256u}) {
      for (double sigma : {0.5, 1.0, 2.0}) instances.push_back({pam(q, sigma, n), "pam"});
    }
  }
  std::size_t runs = 0, qi_failed = 0, cost_bad = 0, boundary_bad = 0;
  double worst = 0.0;
  for (const auto& inst : instances) {
    for (double alpha : kAlphas) {
      const SegmentCostView view(inst.ch, CostFamily::alpha_mi(alpha, inst.ch.px()));
      const QiReport qi = check_qi(view);
      if (!qi.holds) {
        ++qi_failed;
        continue;
      }
      const std::size_t n = inst.ch.n();
      for (std::size_t levels : {2u, 3u, 5u, 8u, 13u, 20u}) {
        if (levels >= n) continue;
        const SdqSolution ref = dp_standard(view, levels);
        for (Engine e : {Engine::yao, Engine::smawk}) {
          const SdqSolution got = run_engine(e, view, levels, QiBasis::from(qi));
          const double err = rel_err(got.cost, ref.cost);
          worst = std::max(worst, err);
          cost_bad += err > 1e-12;
          boundary_bad += got.boundaries != ref.boundaries;
          ++runs;
        }
      }
    }
  }
  return {cost_bad == 0 && boundary_bad == 0 && runs > 0,
          std::to_string(runs) + " engine runs, " + std::to_string(cost_bad) + " cost and " +
              std::to_string(boundary_bad) + " boundary mismatches, max rel err " + fmt("%.2e", worst) + ", " +
              std::to_string(qi_failed) + " (channel, alpha) pairs skipped by the QI scan"};
}

// 3. On channels with sequential collinear posteriors the best SDQ is the best DQ.
Verdict sdq_is_globally_optimal() {
  Rng rng(303);
  std::size_t compared = 0, bad = 0;
  double worst = 0.0;
  auto compare = [&](const Channel& ch) {
    const std::size_t levels = 2 + rng.below(ch.n() - 2);
    for (double alpha : kAlphas) {
      const SegmentCostView view(ch, CostFamily::alpha_mi(alpha, ch.px()));
      const double e = rel_err(dp_standard(view, levels).cost, exhaustive_dq(view, levels).best_cost);
      worst = std::max(worst, e);
      bad += e > 1e-12;
      ++compared;
    }
  };
  for (int k = 0; k < 300; ++k) compare(relabel_outputs_sequential(random_channel(2, 3 + rng.below(5), rng, false)).first);
  for (int k = 0; k < 300; ++k) compare(random_sequential_channel(3, 3 + rng.below(5), rng));
  return {bad == 0, "600 instances (300 sorted q=2, 300 sequential q=3, N<=7) x 4 alphas = " + std::to_string(compared) +
                        " comparisons, " + std::to_string(bad) + " mismatches, max rel err " + fmt("%.2e", worst)};
}

// 4. Sequential collinearity and dominance each imply the QI.
Verdict qi_from_structure() {
  const std::vector<double> alphas{0.25, 0.5, 1.0, 2.0, 4.0, kAlphaInfinity};
  Rng rng(404);
  std::size_t scans = 0, violations = 0, not_dominant = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  auto scan = [&](const Channel& ch) {
    for (double alpha : alphas) {
      const QiReport r = check_qi(SegmentCostView(ch, CostFamily::alpha_mi(alpha, ch.px())), 1e-10);
      ++scans;
      violations += !r.holds;
      min_slack = std::min(min_slack, r.slack_min);
    }
  };
  for (int k = 0; k < 300; ++k) scan(random_sequential_channel(2 + rng.below(6), 3 + rng.below(60), rng));
  for (int k = 0; k < 300; ++k) {
    const Channel ch = random_dominant_channel(2 + rng.below(6), 3 + rng.below(60), rng, k % 2 == 0);
    if (!check_dominance(ch, kDominanceTol, DominanceMode::strict).holds) {
      ++not_dominant;
      continue;
    }
    scan(ch);
  }
  for (std::size_t q : {2u, 4u, 8u}) {
    for (double sigma : {0.3, 1.0, 3.0}) scan(pam(q, sigma, 128));
  }
  return {violations == 0 && not_dominant == 0,
          std::to_string(scans) + " QI scans over 6 alphas, " + std::to_string(violations) +
              " violations beyond 1e-10, min slack " + fmt("%.2e", min_slack) + ", " + std::to_string(not_dominant) +
              " generated channels failed the dominance check"};
}

// 5. PAM sweep: optimal SDQ never loses to greedy combining or KL-means.
Verdict pam_sweep() {
  std::size_t points = 0, bad = 0, fixture_bad = 0;
  std::string notes;
  double max_fixture_err = 0.0;
  for (std::size_t q : {2u, 4u, 8u}) {
    const Channel ch = pam(q, 1.0, 128);
    const CostFamily cost = CostFamily::alpha_mi(1.0, ch.px());
    const SegmentCostView view(ch, cost);
    std::ostringstream csv;
    csv << "M,dp,gc,klmeans\n";
    std::vector<std::vector<double>> rows;
    for (std::size_t m = 2; m <= 20; ++m) {
      const double dp = mi_gap(ch, dp_standard(view, m).assignment());
      const double gc = mi_gap(ch, greedy_combining(ch, cost, m));
      KlMeansOptions ko;
      ko.restarts = 100;
      ko.iterations = 100;
      ko.seed = 1;
      const double km = kl_means(ch, m, ko).mi_gap;
      ++points;
      bad += !(dp <= gc + 1e-9 && dp <= km + 1e-9);
      rows.push_back({static_cast<double>(m), dp, gc, km});
      csv << m << "," << format_double(dp) << "," << format_double(gc) << "," << format_double(km) << "\n";
    }
    const std::filesystem::path fixture = std::filesystem::path(SDQ_FIXTURE_DIR) / ("pam_gap_q" + std::to_string(q) + ".csv");
    if (regen_fixtures || !std::filesystem::exists(fixture)) {
      std::ofstream(fixture, std::ios::binary) << csv.str();
      notes += " wrote " + fixture.filename().string() + ";";
      continue;
    }
    std::ifstream in(fixture);
    std::string line;
    std::getline(in, line);
    for (const auto& row : rows) {
      if (!std::getline(in, line)) {
        ++fixture_bad;
        break;
      }
      std::stringstream ss(line);
      std::string cell;
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::getline(ss, cell, ',');
        const double e = rel_err(std::stod(cell), row[c]);
        max_fixture_err = std::max(max_fixture_err, e);
        fixture_bad += e > 1e-9;
      }
    }
  }
  return {bad == 0 && fixture_bad == 0,
          std::to_string(points) + " (q, M) points, " + std::to_string(bad) + " where dp lost, " +
              std::to_string(fixture_bad) + " fixture mismatches (max rel err " + fmt("%.2e", max_fixture_err) + ")" +
              notes};
}

// 6. IDP refinement on random q=16 channels, reduced scale. Uses the seeded
// randomized relabelling for a fixed 50 iterations.
Verdict idp_refinement() {
  const std::size_t instances = 20, n = 40, m_lo = 8, m_hi = 16;
  const std::size_t ms = m_hi - m_lo + 1;
  std::vector<double> gc_sum(ms, 0.0), idp_gc_sum(ms, 0.0), km_sum(ms, 0.0), idp_km_sum(ms, 0.0);
  std::size_t non_monotone = 0, strict_channels = 0, runs = 0;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    Rng rng(derive_seed(606, inst));
    const Channel ch = random_channel(16, n, rng, true);
    const CostFamily cost = CostFamily::alpha_mi(1.0, ch.px());
    double gc_total = 0.0, idp_gc_total = 0.0;
    for (std::size_t m = m_lo; m <= m_hi; ++m) {
      const Assignment gc = greedy_combining_heap(ch, cost, m);
      KlMeansOptions ko;
      ko.restarts = 100;
      ko.iterations = 100;
      ko.seed = derive_seed(inst, m);
      const Assignment km = kl_means(ch, m, ko).assignment;
      IdpOptions io;
      io.max_iterations = 50;
      io.order = OrderMode::random;
      io.seed = derive_seed(inst, 1000 + m);
      const IdpResult from_gc = idp(ch, cost, m, gc, io);
      const IdpResult from_km = idp(ch, cost, m, km, io);
      for (const auto* r : {&from_gc, &from_km}) {
        const auto& c = r->state.costs;
        for (std::size_t k = 1; k < c.size(); ++k) non_monotone += c[k] > c[k - 1] + 1e-12;
        ++runs;
      }
      const std::size_t slot = m - m_lo;
      const double g_gc = mi_gap(ch, gc), g_igc = mi_gap(ch, from_gc.assignment);
      gc_sum[slot] += g_gc;
      idp_gc_sum[slot] += g_igc;
      km_sum[slot] += mi_gap(ch, km);
      idp_km_sum[slot] += mi_gap(ch, from_km.assignment);
      gc_total += g_gc;
      idp_gc_total += g_igc;
    }
    strict_channels += idp_gc_total < gc_total - 1e-12;
  }
  std::size_t mean_bad = 0;
  for (std::size_t s = 0; s < ms; ++s) {
    mean_bad += idp_gc_sum[s] > gc_sum[s] + 1e-12;
    mean_bad += idp_km_sum[s] > km_sum[s] + 1e-12;
  }
  auto mean_all = [&](const std::vector<double>& v) {
    double t = 0.0;
    for (double x : v) t += x;
    return t / static_cast<double>(instances * ms);
  };
  const bool pass = non_monotone == 0 && mean_bad == 0 && 2 * strict_channels >= instances;
  return {pass, std::to_string(runs) + " idp runs, " + std::to_string(non_monotone) + " cost increases, " +
                    std::to_string(mean_bad) + " M values where a mean idp gap exceeded its initializer, strict gc improvement on " +
                    std::to_string(strict_channels) + "/" + std::to_string(instances) + " channels; mean gaps gc " +
                    fmt("%.4f", mean_all(gc_sum)) + " -> idp " + fmt("%.4f", mean_all(idp_gc_sum)) + ", klmeans " +
                    fmt("%.4f", mean_all(km_sum)) + " -> idp " + fmt("%.4f", mean_all(idp_km_sum))};
}

// 7. Wall-clock ordering of the DP engines and the two greedy variants.
Verdict timing_ordering() {
  const std::size_t reps = 7;
  const Channel ch = pam(2, 1.0, 1000);
  const SegmentCostView view(ch, CostFamily::alpha_mi(1.0, ch.px()));
  const QiBasis basis = QiBasis::from(check_qi(view));
  if (!basis.trusted()) return {false, "PAM channel failed the QI scan"};
  std::vector<double> t_std, t_yao, t_smawk;
  for (std::size_t r = 0; r < reps; ++r) {
    t_std.push_back(time_ms([&] { (void)dp_standard(view, 8); }));
    t_yao.push_back(time_ms([&] { (void)dp_yao(view, 8, basis); }));
    t_smawk.push_back(time_ms([&] { (void)dp_smawk(view, 8, basis); }));
  }
  const double ms_std = median(t_std), ms_yao = median(t_yao), ms_smawk = median(t_smawk);

  const Channel small = pam(2, 1.0, 512);
  const CostFamily cost = CostFamily::alpha_mi(1.0, small.px());
  std::vector<double> t_gc, t_heap;
  for (std::size_t r = 0; r < 5; ++r) {
    t_gc.push_back(time_ms([&] { (void)greedy_combining(small, cost, 8); }));
    t_heap.push_back(time_ms([&] { (void)greedy_combining_heap(small, cost, 8); }));
  }
  const double ms_gc = median(t_gc), ms_heap = median(t_heap);
  const bool pass = ms_smawk < ms_yao && ms_yao < ms_std && ms_heap < ms_gc;
  return {pass, "N=1000 M=8 medians over " + std::to_string(reps) + " reps: smawk " + fmt("%.3f", ms_smawk) + " ms, yao " +
                    fmt("%.3f", ms_yao) + " ms, standard " + fmt("%.3f", ms_std) + " ms; N=512: gc-heap " +
                    fmt("%.1f", ms_heap) + " ms, gc " + fmt("%.1f", ms_gc) + " ms"};
}

// 8. Heap-based greedy combining returns exactly the naive result.
Verdict heap_gc_equivalence() {
  Rng rng(808);
  std::size_t bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + rng.below(62);
    const Channel ch = random_channel(2 + rng.below(5), n, rng, trial % 2 == 0);
    const double alpha = kAlphas[rng.below(kAlphas.size())];
    const CostFamily cost = CostFamily::alpha_mi(alpha, ch.px());
    const std::size_t levels = 2 + rng.below(n - 2);
    bad += greedy_combining(ch, cost, levels).labels != greedy_combining_heap(ch, cost, levels).labels;
  }
  return {bad == 0, "1000 instances with N <= 64, " + std::to_string(bad) + " differing assignments"};
}

// 9. Cost-to-alpha-MI transform against the direct alpha-MI.
Verdict transform_identity() {
  Rng rng(909);
  std::size_t bad = 0, triples = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1200; ++trial) {
    const std::size_t q = 2 + rng.below(6);
    const std::size_t n = 2 + rng.below(20);
    const Channel ch = random_channel(q, n, rng, trial % 2 == 0);
    const std::size_t levels = 1 + rng.below(n);
    Assignment a;
    a.levels = levels;
    a.labels.resize(n);
    for (auto& l : a.labels) l = rng.below(levels);
    const double alpha = trial % 5 == 4 ? rng.uniform(0.1, 6.0) : kAlphas[rng.below(kAlphas.size())];
    const double c = assignment_cost(ch, CostFamily::alpha_mi(alpha, ch.px()), a);
    const double e = rel_err(cost_to_alpha_mi(c, alpha, entropy(ch.px())), alpha_mi(joint_xz(ch, a), alpha));
    worst = std::max(worst, e);
    bad += e > 1e-9;
    ++triples;
  }
  return {bad == 0, std::to_string(triples) + " (channel, quantizer, alpha) triples, " + std::to_string(bad) +
                        " mismatches, max rel err " + fmt("%.2e", worst)};
}

// 10. SMAWK row minima against brute force, with the evaluation budget.
Verdict smawk_bar() {
  Rng rng(1010);
  std::size_t wrong = 0, over_budget = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t rows = 1 + rng.below(64), cols = 1 + rng.below(64);
    const Matrix<double> a = testing::random_monge(rows, cols, rng);
    testing::CountingMatrix fast{&a}, slow{&a};
    wrong += row_minima(fast) != row_minima_brute(slow);
    over_budget += fast.reads > kSmawkEvaluationFactor * (rows + cols);
    worst_ratio = std::max(worst_ratio, static_cast<double>(fast.reads) / static_cast<double>(rows + cols));
  }
  return {wrong == 0 && over_budget == 0,
          "10000 matrices up to 64x64, " + std::to_string(wrong) + " wrong, " + std::to_string(over_budget) +
              " over budget, max reads/(rows+cols) " + fmt("%.2f", worst_ratio) + " (bound " +
              std::to_string(kSmawkEvaluationFactor) + ")"};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only.push_back(std::stoi(argv[++i]));
    } else if (a == "--regen-fixtures") {
      regen_fixtures = true;
    } else {
      std::cerr << "usage: acceptance [--only K]... [--regen-fixtures]\n";
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"engine agreement", engine_agreement},
      {"sdq optimal among all quantizers", sdq_is_globally_optimal},
      {"qi from structure", qi_from_structure},
      {"pam sweep dominance", pam_sweep},
      {"idp refinement", idp_refinement},
      {"timing ordering", timing_ordering},
      {"heap gc equivalence", heap_gc_equivalence},
      {"alpha-mi transform", transform_identity},
      {"smawk bar", smawk_bar},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Verdict v;
    double ms = 0.0;
    try {
      ms = time_ms([&] { v = criteria[k].second(); });
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << id << "] " << criteria[k].first << ": " << v.detail << " ("
              << fmt("%.1f", ms / 1000.0) << " s)" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

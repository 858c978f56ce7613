// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdq/assignment.hpp"
#include "sdq/channel.hpp"
#include "sdq/cost.hpp"
#include "sdq/error.hpp"
#include "sdq/io.hpp"
#include "sdq/oracle.hpp"

namespace sdq {

/// Outcome of one design run. Serialized as a JSON object with fixed key order;
/// wall_clock_ms is the only field that varies between identical runs.
struct DesignReport {
  std::string algorithm;
  double alpha = 1.0;
  LogBase base = LogBase::two;
  std::size_t q = 0;
  std::size_t n = 0;
  std::size_t levels = 0;
  double cost = 0.0;
  double mi_gap = 0.0;  // bits when base is two
  double alpha_mi = 0.0;
  std::optional<std::vector<std::size_t>> boundaries;  // present for sequential quantizers
  Assignment assignment;
  std::optional<double> init_cost;   // iterative designers: cost of the starting quantizer
  std::vector<double> cost_history;  // iterative designers: cost after each iteration
  double wall_clock_ms = 0.0;
  std::map<std::string, std::uint64_t> counters;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;
};

inline std::string log_base_name(LogBase b) { return b == LogBase::two ? "2" : "e"; }

inline LogBase parse_log_base(const std::string& s) {
  if (s == "2") return LogBase::two;
  if (s == "e") return LogBase::e;
  throw ValidationError("log base must be 2 or e, got '" + s + "'");
}

namespace detail {

inline nlohmann::ordered_json alpha_to_json(double alpha) {
  if (std::isinf(alpha)) return "inf";
  return alpha;
}

inline double alpha_from_json(const nlohmann::json& v) {
  if (v.is_string() && v.get<std::string>() == "inf") return kAlphaInfinity;
  if (!v.is_number()) throw FormatError("alpha must be a number or \"inf\"");
  return v.get<double>();
}

template <class T>
T required(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw FormatError(std::string("report is missing '") + key + "'");
  try {
    return doc[key].get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report field '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const DesignReport& r) {
  nlohmann::ordered_json j;
  j["algorithm"] = r.algorithm;
  j["alpha"] = detail::alpha_to_json(r.alpha);
  j["log_base"] = log_base_name(r.base);
  j["q"] = r.q;
  j["N"] = r.n;
  j["M"] = r.levels;
  j["cost"] = r.cost;
  j["mi_gap"] = r.mi_gap;
  j["alpha_mi"] = r.alpha_mi;
  if (r.boundaries) j["boundaries"] = *r.boundaries;
  j["labels"] = r.assignment.labels;
  if (r.init_cost) j["init_cost"] = *r.init_cost;
  if (!r.cost_history.empty()) j["cost_history"] = r.cost_history;
  j["seed"] = r.seed;
  j["counters"] = r.counters;
  j["config"] = r.config;
  j["wall_clock_ms"] = r.wall_clock_ms;
  return j;
}

inline std::string report_to_string(const DesignReport& r) { return report_to_json(r).dump(2) + "\n"; }

inline DesignReport report_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("report must be an object");
  DesignReport r;
  r.algorithm = detail::required<std::string>(j, "algorithm");
  if (!j.contains("alpha")) throw FormatError("report is missing 'alpha'");
  r.alpha = detail::alpha_from_json(j["alpha"]);
  r.base = parse_log_base(detail::required<std::string>(j, "log_base"));
  r.q = detail::required<std::size_t>(j, "q");
  r.n = detail::required<std::size_t>(j, "N");
  r.levels = detail::required<std::size_t>(j, "M");
  r.cost = detail::required<double>(j, "cost");
  r.mi_gap = detail::required<double>(j, "mi_gap");
  r.alpha_mi = detail::required<double>(j, "alpha_mi");
  if (j.contains("boundaries")) r.boundaries = detail::required<std::vector<std::size_t>>(j, "boundaries");
  r.assignment.labels = detail::required<std::vector<std::size_t>>(j, "labels");
  r.assignment.levels = r.levels;
  if (j.contains("init_cost")) r.init_cost = detail::required<double>(j, "init_cost");
  if (j.contains("cost_history")) r.cost_history = detail::required<std::vector<double>>(j, "cost_history");
  r.seed = detail::required<std::uint64_t>(j, "seed");
  r.counters = detail::required<std::map<std::string, std::uint64_t>>(j, "counters");
  r.config = detail::required<std::map<std::string, std::string>>(j, "config");
  r.wall_clock_ms = detail::required<double>(j, "wall_clock_ms");
  return r;
}

inline DesignReport report_from_string(std::string_view text) {
  return report_from_json(detail::parse_json(text, "report"));
}

/// Fills cost, MI gap, alpha-MI and (when sequential) boundaries from a quantizer.
inline void fill_report_metrics(DesignReport& r, const Channel& ch, const Assignment& a) {
  const CostFamily cost = CostFamily::alpha_mi(r.alpha, ch.px(), r.base);
  r.q = ch.q();
  r.n = ch.n();
  r.levels = a.levels;
  r.assignment = a;
  r.cost = assignment_cost(ch, cost, a);
  r.mi_gap = mi_gap(ch, a, r.base);
  r.alpha_mi = alpha_mi(joint_xz(ch, a), r.alpha, r.base);
  r.boundaries.reset();
  if (a.is_sequential() && a == a.canonical()) {
    std::vector<std::size_t> b{0};
    for (std::size_t j = 1; j < a.n(); ++j) {
      if (a.labels[j] != a.labels[j - 1]) b.push_back(j);
    }
    b.push_back(a.n());
    r.boundaries = std::move(b);
  }
}

struct ReportCheck {
  bool cost_ok = false;
  bool gap_ok = false;
  double cost = 0.0;
  double mi_gap = 0.0;
  bool ok() const { return cost_ok && gap_ok; }
};

/// Recomputes cost and MI gap from the stored quantizer.
inline ReportCheck verify_report(const DesignReport& r, const Channel& ch, double tol = 1e-12) {
  if (r.q != ch.q() || r.n != ch.n()) throw ValidationError("report dimensions differ from the channel");
  if (r.assignment.n() != ch.n() || !r.assignment.in_range()) throw ValidationError("report quantizer is malformed");
  const CostFamily cost = CostFamily::alpha_mi(r.alpha, ch.px(), r.base);
  ReportCheck c;
  c.cost = assignment_cost(ch, cost, r.assignment);
  c.mi_gap = mi_gap(ch, r.assignment, r.base);
  c.cost_ok = std::abs(c.cost - r.cost) <= tol * std::max(1.0, std::abs(r.cost));
  c.gap_ok = std::abs(c.mi_gap - r.mi_gap) <= tol * std::max(1.0, std::abs(r.mi_gap));
  return c;
}

/// A gap instance as a channel document extended with the two optima.
inline std::string gap_instance_to_string(const GapInstance& g) {
  auto doc = nlohmann::ordered_json::parse(channel_to_string(g.channel));
  doc["M"] = g.levels;
  doc["trial"] = g.trial;
  doc["sdq_cost"] = g.sdq_cost;
  doc["dq_cost"] = g.dq_cost;
  doc["dq_labels"] = g.dq_partition.labels;
  return doc.dump(2) + "\n";
}

}  // namespace sdq

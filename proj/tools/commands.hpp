// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdq/sdq.hpp"

namespace sdq::cli {

enum ExitCode : int { kOk = 0, kPropertyFails = 1, kUsage = 2, kNumeric = 3 };

/// Everything a single design run depends on.
struct DesignConfig {
  std::string algorithm = "dp";  // dp | dp-yao | dp-smawk | gc | gc-heap | klmeans | idp
  std::size_t levels = 2;
  double alpha = 1.0;
  LogBase base = LogBase::two;
  std::uint64_t seed = 1;
  std::size_t idp_iterations = 50;
  std::size_t restarts = 100;         // KL-means T_i
  std::size_t kl_iterations = 100;    // KL-means T_r
  std::string init = "gc";            // idp starting point: gc | klmeans | file
  std::optional<Assignment> init_assignment;
  OrderMode order = OrderMode::stable;
  Engine idp_engine = Engine::standard;
  bool assume_qi = false;
  std::size_t threads = 0;
};

/// Runs one designer and fills a report (metrics, counters, config echo).
/// Wall-clock covers the designer only.
DesignReport design(const Channel& ch, const DesignConfig& cfg);

/// Every algorithm id accepted by design(), plus the idp-gc / idp-klmeans aliases.
const std::vector<std::string>& algorithm_ids();

/// Resolves aliases such as idp-gc into (algorithm, init).
DesignConfig resolve_algorithm(DesignConfig cfg, const std::string& id);

double parse_alpha(const std::string& text);
std::pair<std::size_t, std::size_t> parse_range(const std::string& text);

/// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdq::cli

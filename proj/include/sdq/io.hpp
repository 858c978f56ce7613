// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdq/assignment.hpp"
#include "sdq/channel.hpp"
#include "sdq/error.hpp"
#include "sdq/matrix.hpp"

// Channel files: a JSON object {"q", "n", "px", "pyx"}. Numbers are written
// with 17 significant digits so that reading back reproduces every bit.

namespace sdq {

/// Shortest printf form that is guaranteed to round-trip a double.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) throw DomainError("cannot serialize a non-finite number");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_array(std::ostream& os, std::span<const double> v) {
  os << '[';
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) os << ", ";
    os << format_double(v[k]);
  }
  os << ']';
}

inline nlohmann::json parse_json(std::string_view text, const std::string& what) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(what + ": " + e.what());
  }
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("write failed for " + path.string());
}

inline std::size_t size_field(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_integer() || doc[key].get<long long>() < 0) {
    throw FormatError(std::string("field '") + key + "' must be a non-negative integer");
  }
  return doc[key].get<std::size_t>();
}

inline std::vector<double> number_array(const nlohmann::json& v, const std::string& what, std::size_t expected) {
  if (!v.is_array() || v.size() != expected) {
    throw FormatError(what + " must be an array of " + std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& x : v) {
    if (!x.is_number()) throw FormatError(what + " holds a non-numeric entry");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace detail

/// Writes the channel document; rows of pyx one per line.
inline void write_channel(std::ostream& os, const Channel& ch) {
  os << "{\n  \"q\": " << ch.q() << ",\n  \"n\": " << ch.n() << ",\n  \"px\": ";
  detail::write_array(os, ch.px());
  os << ",\n  \"pyx\": [\n";
  for (std::size_t i = 0; i < ch.q(); ++i) {
    os << "    ";
    detail::write_array(os, ch.pyx().row(i));
    os << (i + 1 < ch.q() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
}

inline std::string channel_to_string(const Channel& ch) {
  std::ostringstream os;
  write_channel(os, ch);
  return os.str();
}

/// Parses and validates a channel document. Shape problems raise
/// FormatError; probability invariants raise ValidationError.
inline Channel channel_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw FormatError("channel document must be an object");
  const std::size_t q = detail::size_field(doc, "q");
  const std::size_t n = detail::size_field(doc, "n");
  if (!doc.contains("px") || !doc.contains("pyx")) throw FormatError("channel document needs 'px' and 'pyx'");
  std::vector<double> px = detail::number_array(doc["px"], "px", q);
  const auto& rows = doc["pyx"];
  if (!rows.is_array() || rows.size() != q) throw FormatError("pyx must be an array of q rows");
  Matrix<double> pyx(q, n);
  for (std::size_t i = 0; i < q; ++i) {
    auto row = detail::number_array(rows[i], "pyx row " + std::to_string(i), n);
    std::copy(row.begin(), row.end(), pyx.row(i).begin());
  }
  return make_channel(std::move(px), std::move(pyx));
}

inline Channel channel_from_string(std::string_view text) {
  return channel_from_json(detail::parse_json(text, "channel document"));
}

inline Channel read_channel(const std::filesystem::path& path) { return channel_from_string(detail::slurp(path)); }

inline void save_channel(const std::filesystem::path& path, const Channel& ch) {
  detail::spit(path, channel_to_string(ch));
}

/// {"levels": M, "labels": [...]} for a deterministic quantizer.
inline nlohmann::ordered_json assignment_to_json(const Assignment& a) {
  nlohmann::ordered_json j;
  j["levels"] = a.levels;
  j["labels"] = a.labels;
  return j;
}

inline Assignment assignment_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("labels")) throw FormatError("quantizer document needs 'labels'");
  Assignment a;
  a.levels = detail::size_field(doc, "levels");
  if (!doc["labels"].is_array()) throw FormatError("'labels' must be an array");
  for (const auto& v : doc["labels"]) {
    if (!v.is_number_integer() || v.get<long long>() < 0) throw FormatError("labels must be non-negative integers");
    a.labels.push_back(v.get<std::size_t>());
  }
  if (!a.in_range()) throw ValidationError("quantizer label out of range");
  return a;
}

inline Assignment read_assignment(const std::filesystem::path& path) {
  return assignment_from_json(detail::parse_json(detail::slurp(path), "quantizer document"));
}

}  // namespace sdq

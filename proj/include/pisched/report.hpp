// Copyright 2026 The pisched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// CSV and JSON reports of campaign rows. Doubles are written in shortest
// round-trip form, so parsing an emitted report gives back the same rows.

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pisched/campaign.hpp"
#include "pisched/distribution.hpp"
#include "pisched/error.hpp"

#ifndef PISCHED_VERSION
#define PISCHED_VERSION "unknown"
#endif

namespace pisched {

inline constexpr std::string_view kCsvColumns =
    "trial,makespan,total_work,max_load,stage1_makespan,stage2_makespan,"
    "greedy_first_best,seed";

inline constexpr std::string_view version() { return PISCHED_VERSION; }

using HeaderBlock = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string fmt(double v) { return format_double(v); }

inline std::string fmt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

inline std::string join_specs(const std::vector<DistributionSpec>& specs) {
  std::string out;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    if (s) out += ';';
    out += specs[s].to_string();
  }
  return out;
}

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto at = line.find(sep, start);
    out.emplace_back(line.substr(start, at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

template <class T>
T parse_integer(std::string_view s) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidArgument("report: bad integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

// Config echo, version and aggregates. The thread count is not echoed.
inline HeaderBlock header_block(const CampaignReport& r) {
  const auto& c = r.config;
  const auto& mech = c.mechanism;
  HeaderBlock h;
  h.emplace_back("version", std::string(version()));
  h.emplace_back("mechanism", to_string(mech.kind));
  h.emplace_back("c", detail::fmt(mech.c));
  h.emplace_back("beta", detail::fmt(mech.beta));
  h.emplace_back("delta", detail::fmt(mech.delta));
  h.emplace_back("k", detail::fmt(mech.k));
  h.emplace_back("dist", detail::join_specs(c.specs));
  h.emplace_back("n", std::to_string(c.n));
  h.emplace_back("m", std::to_string(c.m));
  h.emplace_back("trials", std::to_string(c.trials));
  h.emplace_back("seed", std::to_string(c.seed));
  h.emplace_back("reference", to_string(c.reference));
  h.emplace_back("paired", c.paired ? "true" : "false");
  if (r.reserve) {
    h.emplace_back("reserve_draws", std::to_string(r.reserve->draws));
    h.emplace_back("reserve_tau", detail::fmt(r.reserve->tau.value));
    if (!r.reserve->warning.empty()) {
      h.emplace_back("reserve_warning", r.reserve->warning);
    }
  }
  h.emplace_back("mean_makespan", detail::fmt(r.mean_makespan));
  h.emplace_back("makespan_se", detail::fmt(r.makespan_se));
  h.emplace_back("mean_max_load", detail::fmt(r.mean_max_load));
  h.emplace_back("worst_max_load", std::to_string(r.worst_max_load));
  h.emplace_back("mean_unscheduled", detail::fmt(r.mean_unscheduled));
  if (r.reference) {
    h.emplace_back("reference_machines",
                   std::to_string(r.reference->machines_used));
    h.emplace_back("reference_mean", detail::fmt(r.reference->mean));
    h.emplace_back("reference_se", detail::fmt(r.reference->std_error));
    h.emplace_back("ratio", detail::fmt(r.ratio));
    h.emplace_back("ratio_se", detail::fmt(r.ratio_se));
  }
  h.emplace_back("invariant_failures",
                 std::to_string(r.invariant_failures.size()));
  return h;
}

inline std::string emit_csv(const std::vector<ReportRow>& rows,
                            const HeaderBlock& header = {}) {
  std::string out;
  for (const auto& [key, value] : header) {
    out += "# " + key + ": " + value + "\n";
  }
  out += kCsvColumns;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.trial) + ',' + detail::fmt(r.makespan) + ',' +
           detail::fmt(r.total_work) + ',' + std::to_string(r.max_load) + ',' +
           detail::fmt(r.stage1_makespan) + ',' +
           detail::fmt(r.stage2_makespan) + ',' +
           detail::fmt(r.greedy_first_best) + ',' + std::to_string(r.seed) +
           '\n';
  }
  return out;
}

inline std::vector<ReportRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool seen_columns = false;
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_columns) {
      if (line != kCsvColumns) {
        throw InvalidArgument("report: unexpected CSV columns '" + line + "'");
      }
      seen_columns = true;
      continue;
    }
    const auto f = detail::split(line, ',');
    if (f.size() != 8) throw InvalidArgument("report: bad CSV row '" + line + "'");
    auto opt = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return detail::parse_double(s);
    };
    ReportRow r;
    r.trial = detail::parse_integer<std::size_t>(f[0]);
    r.makespan = detail::parse_double(f[1]);
    r.total_work = detail::parse_double(f[2]);
    r.max_load = detail::parse_integer<int>(f[3]);
    r.stage1_makespan = opt(f[4]);
    r.stage2_makespan = opt(f[5]);
    r.greedy_first_best = detail::parse_double(f[6]);
    r.seed = detail::parse_integer<std::uint64_t>(f[7]);
    rows.push_back(r);
  }
  if (!seen_columns) throw InvalidArgument("report: missing CSV column line");
  return rows;
}

inline nlohmann::ordered_json to_json(const ReportRow& r) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::ordered_json {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  return nlohmann::ordered_json{{"trial", r.trial},
          {"makespan", r.makespan},
          {"total_work", r.total_work},
          {"max_load", r.max_load},
          {"stage1_makespan", opt(r.stage1_makespan)},
          {"stage2_makespan", opt(r.stage2_makespan)},
          {"greedy_first_best", r.greedy_first_best},
          {"seed", r.seed}};
}

inline ReportRow row_from_json(const nlohmann::json& j) {
  auto opt = [](const nlohmann::json& v) -> std::optional<double> {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
  };
  ReportRow r;
  r.trial = j.at("trial").get<std::size_t>();
  r.makespan = j.at("makespan").get<double>();
  r.total_work = j.at("total_work").get<double>();
  r.max_load = j.at("max_load").get<int>();
  r.stage1_makespan = opt(j.at("stage1_makespan"));
  r.stage2_makespan = opt(j.at("stage2_makespan"));
  r.greedy_first_best = j.at("greedy_first_best").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

inline std::string emit_json(const std::vector<ReportRow>& rows,
                             const HeaderBlock& header = {}) {
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [key, value] : header) meta[key] = value;
  nlohmann::ordered_json doc;
  doc["header"] = std::move(meta);
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) doc["rows"].push_back(to_json(r));
  return doc.dump(2) + "\n";
}

inline std::vector<ReportRow> parse_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  std::vector<ReportRow> rows;
  for (const auto& r : doc.at("rows")) rows.push_back(row_from_json(r));
  return rows;
}

enum class ReportFormat { kCsv, kJson };

inline ReportFormat parse_format(const std::string& s) {
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "json") return ReportFormat::kJson;
  throw InvalidArgument("unknown report format '" + s + "'");
}

inline std::string emit_report(const CampaignReport& r, ReportFormat format) {
  const auto header = header_block(r);
  return format == ReportFormat::kCsv ? emit_csv(r.rows, header)
                                      : emit_json(r.rows, header);
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace pisched

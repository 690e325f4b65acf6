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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pisched/distribution.hpp"
#include "pisched/error.hpp"
#include "pisched/random.hpp"

namespace pisched {

// A realized scheduling instance: runtime(j, i) is the size of job j on
// machine i. Immutable once built.
class Instance {
 public:
  Instance(int n, int m, std::vector<double> runtimes,
           std::vector<DistributionSpec> specs = {})
      : n_(n), m_(m), runtimes_(std::move(runtimes)), specs_(std::move(specs)) {
    detail::require(n >= 1 && m >= 1, "instance needs n >= 1 and m >= 1");
    detail::require(runtimes_.size() == static_cast<std::size_t>(n) *
                                            static_cast<std::size_t>(m),
                    "runtime matrix size does not match n x m");
    for (double t : runtimes_) {
      detail::require(t >= 0 && std::isfinite(t),
                      "runtimes must be finite and nonnegative");
    }
    detail::require(specs_.empty() || specs_.size() == static_cast<std::size_t>(n),
                    "need one distribution spec per job");
  }

  // Rows given as nested vectors, handy for fixtures.
  static Instance from_rows(const std::vector<std::vector<double>>& rows) {
    detail::require(!rows.empty() && !rows.front().empty(), "empty matrix");
    const int m = static_cast<int>(rows.front().size());
    std::vector<double> flat;
    for (const auto& r : rows) {
      detail::require(static_cast<int>(r.size()) == m, "ragged matrix");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return Instance(static_cast<int>(rows.size()), m, std::move(flat));
  }

  int n() const { return n_; }
  int m() const { return m_; }
  double load_factor() const { return static_cast<double>(n_) / m_; }

  double runtime(int j, int i) const {
    return runtimes_[static_cast<std::size_t>(j) * m_ + i];
  }
  std::span<const double> row(int j) const {
    return {runtimes_.data() + static_cast<std::size_t>(j) * m_,
            static_cast<std::size_t>(m_)};
  }
  const std::vector<double>& runtimes() const { return runtimes_; }
  const std::vector<DistributionSpec>& specs() const { return specs_; }

  // Copy with job j's reported row replaced; used for misreport audits.
  Instance with_row(int j, std::span<const double> values) const {
    detail::require(values.size() == static_cast<std::size_t>(m_),
                    "replacement row has wrong length");
    std::vector<double> copy = runtimes_;
    std::copy(values.begin(), values.end(),
              copy.begin() + static_cast<std::ptrdiff_t>(j) * m_);
    return Instance(n_, m_, std::move(copy), specs_);
  }

  // Copy with machine i's column replaced (a machine's full report).
  Instance with_column(int i, std::span<const double> values) const {
    detail::require(values.size() == static_cast<std::size_t>(n_),
                    "replacement column has wrong length");
    std::vector<double> copy = runtimes_;
    for (int j = 0; j < n_; ++j) {
      copy[static_cast<std::size_t>(j) * m_ + i] = values[j];
    }
    return Instance(n_, m_, std::move(copy), specs_);
  }

  std::vector<double> column(int i) const {
    std::vector<double> out(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) out[j] = runtime(j, i);
    return out;
  }

  // Sub-instance keeping the listed jobs (in order) and every machine.
  Instance select_jobs(std::span<const int> jobs) const {
    detail::require(!jobs.empty(), "select_jobs: empty job list");
    std::vector<double> flat;
    flat.reserve(jobs.size() * static_cast<std::size_t>(m_));
    std::vector<DistributionSpec> specs;
    for (int j : jobs) {
      const auto r = row(j);
      flat.insert(flat.end(), r.begin(), r.end());
      if (!specs_.empty()) specs.push_back(specs_[j]);
    }
    return Instance(static_cast<int>(jobs.size()), m_, std::move(flat),
                    std::move(specs));
  }

  // Machines in job j's preference order: ascending runtime, ties to the
  // lower machine index.
  std::vector<int> preference(int j) const {
    std::vector<int> order(static_cast<std::size_t>(m_));
    std::iota(order.begin(), order.end(), 0);
    const auto r = row(j);
    std::stable_sort(order.begin(), order.end(),
                     [&r](int a, int b) { return r[a] < r[b]; });
    return order;
  }

  // 1-based rank of machine i in job j's preference order.
  int rank_of(int j, int i) const {
    const double t = runtime(j, i);
    int rank = 1;
    for (int k = 0; k < m_; ++k) {
      const double u = runtime(j, k);
      if (u < t || (u == t && k < i)) ++rank;
    }
    return rank;
  }

 private:
  int n_;
  int m_;
  std::vector<double> runtimes_;
  std::vector<DistributionSpec> specs_;
};

// Entry (j, i) drawn i.i.d. from specs[j]; rows independent.
inline Instance sample_instance(const std::vector<DistributionSpec>& specs,
                                int m, Rng& rng) {
  detail::require(!specs.empty(), "sample_instance: no job specs");
  detail::require(m >= 1, "sample_instance: m must be >= 1");
  const int n = static_cast<int>(specs.size());
  std::vector<double> flat(static_cast<std::size_t>(n) * m);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      flat[static_cast<std::size_t>(j) * m + i] = specs[j].sample(rng);
    }
  }
  return Instance(n, m, std::move(flat), specs);
}

// n jobs sharing one spec.
inline Instance sample_instance(const DistributionSpec& spec, int n, int m,
                                Rng& rng) {
  return sample_instance(std::vector<DistributionSpec>(n, spec), m, rng);
}

// Minimum of row j over `machines` (all machines when empty).
inline double best_runtime(const Instance& inst, int j,
                           std::span<const int> machines = {}) {
  if (machines.empty()) {
    const auto r = inst.row(j);
    return *std::min_element(r.begin(), r.end());
  }
  double best = inst.runtime(j, machines.front());
  for (int i : machines) best = std::min(best, inst.runtime(j, i));
  return best;
}

// Best runtime over the first `count` machines.
inline double best_runtime_prefix(const Instance& inst, int j, int count) {
  detail::require(count >= 1 && count <= inst.m(),
                  "best_runtime_prefix: machine count out of range");
  const auto r = inst.row(j);
  return *std::min_element(r.begin(), r.begin() + count);
}

// r-th smallest entry of row j, 1 <= r <= m.
inline double rank_runtime(const Instance& inst, int j, int r) {
  if (r < 1 || r > inst.m()) {
    throw InvalidArgument("rank_runtime: rank " + std::to_string(r) +
                          " outside [1, " + std::to_string(inst.m()) + "]");
  }
  const auto row = inst.row(j);
  std::vector<double> sorted(row.begin(), row.end());
  std::nth_element(sorted.begin(), sorted.begin() + (r - 1), sorted.end());
  return sorted[static_cast<std::size_t>(r - 1)];
}

// JSON fixture format: {n, m, runtimes: row-major array, specs: [strings]}.
inline nlohmann::json to_json(const Instance& inst) {
  nlohmann::json specs = nlohmann::json::array();
  for (const auto& s : inst.specs()) specs.push_back(s.to_string());
  return {{"n", inst.n()},
          {"m", inst.m()},
          {"runtimes", inst.runtimes()},
          {"specs", specs}};
}

inline Instance instance_from_json(const nlohmann::json& j) {
  try {
    std::vector<DistributionSpec> specs;
    if (j.contains("specs")) {
      for (const auto& s : j.at("specs")) {
        specs.push_back(DistributionSpec::parse(s.get<std::string>()));
      }
    }
    return Instance(j.at("n").get<int>(), j.at("m").get<int>(),
                    j.at("runtimes").get<std::vector<double>>(),
                    std::move(specs));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("instance JSON: ") + e.what());
  }
}

}  // namespace pisched

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

// Monte Carlo estimators of the two lower bounds on first-best makespan:
//
//   worst best    E[max_j min over m' machines of T_j]
//   average best  E[sum_j min over m' machines of T_j] / m'
//
// and of their maximum on a reduced machine count round(delta m).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pisched/distribution.hpp"
#include "pisched/error.hpp"
#include "pisched/instance.hpp"
#include "pisched/order_stats.hpp"
#include "pisched/random.hpp"
#include "pisched/stats.hpp"

namespace pisched {

enum class BoundKind { kWorstBest, kAverageBest, kMaxOfBoth };

inline std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::kWorstBest:
      return "worst-best";
    case BoundKind::kAverageBest:
      return "average-best";
    case BoundKind::kMaxOfBoth:
      return "max-of-both";
  }
  return "?";
}

struct OptEstimate {
  BoundKind kind = BoundKind::kWorstBest;
  int machines_used = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

// round(delta m); throws when that leaves no machine.
inline int reduced_machine_count(double delta, int m) {
  detail::require(delta > 0 && delta <= 1, "reduced machines: delta in (0, 1]");
  const long long count = std::llround(delta * m);
  if (count < 1) {
    throw InvalidArgument("reduced machine count round(" +
                          std::to_string(delta) + " * " + std::to_string(m) +
                          ") is below one");
  }
  return static_cast<int>(count);
}

// Per-trial values of both bounds from one realization of best runtimes.
struct BoundSample {
  double worst_best = 0.0;
  double average_best = 0.0;
};

inline BoundSample sample_bounds(const std::vector<DistributionSpec>& specs,
                                 int machines, Rng& rng) {
  BoundSample s;
  double sum = 0.0;
  for (const auto& spec : specs) {
    const double b = sample_min(spec, machines, rng);
    s.worst_best = std::max(s.worst_best, b);
    sum += b;
  }
  s.average_best = sum / machines;
  return s;
}

// The same two quantities read off a realized instance restricted to its
// first `machines` columns (paired estimation).
inline BoundSample bounds_on_prefix(const Instance& inst, int machines) {
  BoundSample s;
  double sum = 0.0;
  for (int j = 0; j < inst.n(); ++j) {
    const double b = best_runtime_prefix(inst, j, machines);
    s.worst_best = std::max(s.worst_best, b);
    sum += b;
  }
  s.average_best = sum / machines;
  return s;
}

namespace detail {

inline OptEstimate estimate(const std::vector<DistributionSpec>& specs,
                            int machines, std::size_t trials, Rng& rng,
                            BoundKind kind) {
  detail::require(machines >= 1, "bounds: machine count must be >= 1");
  detail::require(trials >= 1, "bounds: trials must be >= 1");
  detail::require(!specs.empty(), "bounds: no job specs");
  RunningStats acc;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = sample_bounds(specs, machines, rng);
    acc.add(kind == BoundKind::kWorstBest ? s.worst_best : s.average_best);
  }
  return {kind, machines, acc.mean(), acc.std_error(), trials};
}

}  // namespace detail

inline OptEstimate expected_worst_best(const std::vector<DistributionSpec>& specs,
                                       int machines, std::size_t trials,
                                       Rng& rng) {
  return detail::estimate(specs, machines, trials, rng, BoundKind::kWorstBest);
}

inline OptEstimate expected_worst_best(const DistributionSpec& spec, int n,
                                       int machines, std::size_t trials,
                                       Rng& rng) {
  return expected_worst_best(std::vector<DistributionSpec>(n, spec), machines,
                             trials, rng);
}

// Divides by the machine count actually used, so reduced-machine variants
// average over the reduced set.
inline OptEstimate expected_average_best(
    const std::vector<DistributionSpec>& specs, int machines,
    std::size_t trials, Rng& rng) {
  return detail::estimate(specs, machines, trials, rng, BoundKind::kAverageBest);
}

inline OptEstimate expected_average_best(const DistributionSpec& spec, int n,
                                         int machines, std::size_t trials,
                                         Rng& rng) {
  return expected_average_best(std::vector<DistributionSpec>(n, spec),
                               machines, trials, rng);
}

struct OptReference {
  OptEstimate worst_best;
  OptEstimate average_best;
  OptEstimate combined;  // the larger of the two
};

// Both bounds on round(delta m) machines from shared draws, and the larger.
inline OptReference opt_reference_detail(
    const std::vector<DistributionSpec>& specs, int m, double delta,
    std::size_t trials, Rng& rng) {
  const int machines = reduced_machine_count(delta, m);
  detail::require(trials >= 1, "opt_reference: trials must be >= 1");
  RunningStats worst;
  RunningStats average;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = sample_bounds(specs, machines, rng);
    worst.add(s.worst_best);
    average.add(s.average_best);
  }
  OptReference r;
  r.worst_best = {BoundKind::kWorstBest, machines, worst.mean(),
                  worst.std_error(), trials};
  r.average_best = {BoundKind::kAverageBest, machines, average.mean(),
                    average.std_error(), trials};
  r.combined = worst.mean() >= average.mean() ? r.worst_best : r.average_best;
  r.combined.kind = BoundKind::kMaxOfBoth;
  return r;
}

inline OptEstimate opt_reference(const std::vector<DistributionSpec>& specs,
                                 int m, double delta, std::size_t trials,
                                 Rng& rng) {
  return opt_reference_detail(specs, m, delta, trials, rng).combined;
}

inline OptEstimate opt_reference(const DistributionSpec& spec, int n, int m,
                                 double delta, std::size_t trials, Rng& rng) {
  return opt_reference(std::vector<DistributionSpec>(n, spec), m, delta,
                       trials, rng);
}

}  // namespace pisched

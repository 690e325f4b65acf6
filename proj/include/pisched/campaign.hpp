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

// Simulation campaigns: many sampled instances through one mechanism, with
// the makespan compared against a lower bound on the optimum.
//
// Trial t draws its instance from derive_seed(seed, 0, t) and, unless paired,
// its reference sample from derive_seed(seed, 1, t). Rows are stored by trial
// index and reduced in that order, so the thread count never changes a bit of
// the result.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pisched/assign.hpp"
#include "pisched/bounds.hpp"
#include "pisched/distribution.hpp"
#include "pisched/error.hpp"
#include "pisched/instance.hpp"
#include "pisched/mechanism.hpp"
#include "pisched/random.hpp"
#include "pisched/stats.hpp"

namespace pisched {

enum class Reference { kOptHalf, kOptThird, kOptDeltaHalf, kNone };

inline std::string to_string(Reference r) {
  switch (r) {
    case Reference::kOptHalf:
      return "opt-half";
    case Reference::kOptThird:
      return "opt-third";
    case Reference::kOptDeltaHalf:
      return "opt-delta-half";
    case Reference::kNone:
      return "none";
  }
  return "?";
}

inline Reference parse_reference(const std::string& s) {
  if (s == "opt-half") return Reference::kOptHalf;
  if (s == "opt-third") return Reference::kOptThird;
  if (s == "opt-delta-half") return Reference::kOptDeltaHalf;
  if (s == "none") return Reference::kNone;
  throw InvalidArgument("unknown reference '" + s + "'");
}

struct ExperimentConfig {
  MechanismConfig mechanism;
  std::vector<DistributionSpec> specs;  // cycled over jobs
  int n = 1;
  int m = 1;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  Reference reference = Reference::kNone;
  bool paired = false;
  ReserveTuning tuning = ReserveTuning::kTheorem2;
  int threads = 0;  // 0: hardware concurrency

  bool iid() const {
    return std::all_of(specs.begin(), specs.end(),
                       [&](const auto& s) { return s == specs.front(); });
  }

  std::vector<DistributionSpec> job_specs() const {
    std::vector<DistributionSpec> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) out.push_back(specs[j % specs.size()]);
    return out;
  }

  // Machine share of the reference and whether it takes the larger bound.
  double reference_delta() const {
    switch (reference) {
      case Reference::kOptHalf:
        return 0.5;
      case Reference::kOptThird:
        return 1.0 / 3.0;
      case Reference::kOptDeltaHalf:
        return mechanism.delta / 2.0;
      case Reference::kNone:
        break;
    }
    return 1.0;
  }

  int reference_machines() const {
    const double raw = reference_delta() * m;
    if (raw < 1.0) {
      throw InvalidArgument(to_string(reference) + " on m=" + std::to_string(m) +
                            " leaves fewer than one machine");
    }
    return reduced_machine_count(reference_delta(), m);
  }

  void validate() const {
    detail::require<ConfigError>(n >= 1 && m >= 1, "n and m must be >= 1");
    detail::require<ConfigError>(trials >= 1, "trials must be >= 1");
    detail::require<ConfigError>(!specs.empty(), "no job distribution given");
    detail::require<ConfigError>(threads >= 0, "threads must be >= 0");
    mechanism.validate();
    if (mechanism.uses_reserve() && !iid()) {
      throw ConfigError(to_string(mechanism.kind) +
                        " needs i.i.d. jobs; got heterogeneous job specs");
    }
    if (reference != Reference::kNone) reference_machines();
  }
};

struct ReportRow {
  std::size_t trial = 0;
  double makespan = 0.0;
  double total_work = 0.0;
  int max_load = 0;
  std::optional<double> stage1_makespan;
  std::optional<double> stage2_makespan;
  double greedy_first_best = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const ReportRow&) const = default;
};

struct CampaignReport {
  ExperimentConfig config;
  std::optional<ReserveDerivation> reserve;  // when the campaign derived beta
  std::vector<ReportRow> rows;
  std::vector<int> unscheduled;  // per trial
  double mean_makespan = 0.0;
  double makespan_se = 0.0;
  double mean_max_load = 0.0;
  int worst_max_load = 0;
  double mean_unscheduled = 0.0;
  std::optional<OptEstimate> reference;
  std::optional<double> ratio;
  std::optional<double> ratio_se;
  std::vector<std::string> invariant_failures;
};

// Fills in beta from the chosen tuning when the mechanism needs one and none
// was given. The thm2 and thm3 tunings with a sieve-only mechanism reuse config.delta.
inline std::optional<ReserveDerivation> resolve_reserve(ExperimentConfig& cfg) {
  if (!cfg.mechanism.uses_reserve() || cfg.mechanism.beta) return std::nullopt;
  if (!cfg.iid()) {
    throw ConfigError("reserve tuning needs i.i.d. jobs");
  }
  Rng rng(derive_seed(cfg.seed, 2, 0));
  auto d = derive_reserve(cfg.specs.front(), cfg.n, cfg.m, cfg.mechanism.delta,
                          cfg.tuning, cfg.mechanism.k, &rng);
  cfg.mechanism.beta = d.beta;
  return d;
}

namespace detail {

struct TrialResult {
  ReportRow row;
  int unscheduled = 0;
  double reference = 0.0;
  std::vector<std::string> failures;
};

inline TrialResult run_trial(const ExperimentConfig& cfg,
                             const std::vector<DistributionSpec>& jobs,
                             int ref_machines, std::size_t t) {
  TrialResult r;
  const std::uint64_t seed = derive_seed(cfg.seed, 0, t);
  Rng rng(seed);
  const Instance inst = sample_instance(jobs, cfg.m, rng);
  const Outcome o = run_mechanism(cfg.mechanism, inst, Payments::kSkip);
  const Schedule& s = o.schedule;

  r.row.trial = t;
  r.row.seed = seed;
  r.row.makespan = s.makespan;
  r.row.total_work = s.total_work;
  r.row.max_load = s.max_load();
  r.row.greedy_first_best = first_best_makespan_greedy(inst);
  if (cfg.mechanism.kind == MechanismKind::kSieveBoundedOverload) {
    r.row.stage1_makespan = o.stage1_makespan;
    r.row.stage2_makespan = o.stage2_makespan;
  }
  r.unscheduled = s.unscheduled();

  auto fail = [&](const std::string& what) {
    r.failures.push_back("trial " + std::to_string(t) + ": " + what);
  };
  double longest = 0.0;
  for (int j = 0; j < inst.n(); ++j) {
    if (s.scheduled(j)) longest = std::max(longest, inst.runtime(j, s.assignment[j]));
  }
  if (s.makespan + kWorkTolerance < longest) {
    fail("makespan below a scheduled runtime");
  }
  if (o.cap > 0) {
    for (int i = o.sieve_machines; i < inst.m(); ++i) {
      if (s.loads[i] > o.cap) fail("load above cap on machine " + std::to_string(i));
    }
  }
  if (cfg.mechanism.kind != MechanismKind::kSieve && r.unscheduled > 0) {
    fail("schedule incomplete");
  }

  if (ref_machines > 0) {
    const BoundSample b =
        cfg.paired ? bounds_on_prefix(inst, ref_machines) : [&] {
          Rng ref_rng(derive_seed(cfg.seed, 1, t));
          return sample_bounds(jobs, ref_machines, ref_rng);
        }();
    r.reference = cfg.reference == Reference::kOptHalf
                      ? b.worst_best
                      : std::max(b.worst_best, b.average_best);
  }
  return r;
}

}  // namespace detail

// Runs the campaign. `config.mechanism.beta` is resolved first when missing.
inline CampaignReport run_campaign(ExperimentConfig config) {
  CampaignReport report;
  report.reserve = resolve_reserve(config);
  config.validate();
  report.config = config;

  const auto jobs = config.job_specs();
  const int ref_machines =
      config.reference == Reference::kNone ? 0 : config.reference_machines();
  std::vector<detail::TrialResult> results(config.trials);

  unsigned workers = config.threads > 0
                         ? static_cast<unsigned>(config.threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, config.trials));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (std::size_t t = next++; t < config.trials; t = next++) {
      try {
        results[t] = detail::run_trial(config, jobs, ref_machines, t);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = config.trials;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  RunningStats makespan;
  RunningStats load;
  RunningStats unscheduled;
  RunningStats reference;
  double cross = 0.0;  // sum of (x - mean x)(y - mean y), paired mode
  for (auto& r : results) {
    makespan.add(r.row.makespan);
    load.add(r.row.max_load);
    unscheduled.add(r.unscheduled);
    report.worst_max_load = std::max(report.worst_max_load, r.row.max_load);
    if (ref_machines > 0) reference.add(r.reference);
    report.unscheduled.push_back(r.unscheduled);
    for (auto& f : r.failures) report.invariant_failures.push_back(std::move(f));
    report.rows.push_back(r.row);
  }
  report.mean_makespan = makespan.mean();
  report.makespan_se = makespan.std_error();
  report.mean_max_load = load.mean();
  report.mean_unscheduled = unscheduled.mean();
  if (ref_machines > 0) {
    report.reference = OptEstimate{
        config.reference == Reference::kOptHalf ? BoundKind::kWorstBest
                                                : BoundKind::kMaxOfBoth,
        ref_machines, reference.mean(), reference.std_error(), config.trials};
    double cov = 0.0;
    if (config.paired && config.trials > 1) {
      for (const auto& r : results) {
        cross += (r.row.makespan - makespan.mean()) *
                 (r.reference - reference.mean());
      }
      cov = cross / static_cast<double>(config.trials - 1) /
            static_cast<double>(config.trials);
    }
    report.ratio = makespan.mean() / reference.mean();
    report.ratio_se = ratio_std_error(makespan.mean(), makespan.std_error(),
                                      reference.mean(), reference.std_error(),
                                      cov);
  }
  return report;
}

}  // namespace pisched

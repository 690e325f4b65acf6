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

// Truthful scheduling mechanisms.
//
// All four mechanisms are VCG over a fixed range of schedules:
//
//   minimum work            every schedule
//   bounded overload        at most ceil(c n / m) jobs per machine
//   sieve                   every schedule plus a dummy machine of runtime
//                           beta; dummy jobs stay unscheduled
//   sieve + bounded overload
//                           the first ceil((1 - delta) m) machines run the
//                           sieve, the rest run bounded overload on the
//                           jobs the sieve left over
//
// Payments are Clarke pivots: machine i receives the optimum of its range
// with i removed minus the cost the others bear in the chosen schedule. A
// machine of the two-stage mechanism is priced inside its own stage only.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pisched/assign.hpp"
#include "pisched/distribution.hpp"
#include "pisched/error.hpp"
#include "pisched/instance.hpp"
#include "pisched/order_stats.hpp"
#include "pisched/random.hpp"

namespace pisched {

enum class MechanismKind {
  kMinimumWork,
  kBoundedOverload,
  kSieve,
  kSieveBoundedOverload,
};

inline std::string to_string(MechanismKind k) {
  switch (k) {
    case MechanismKind::kMinimumWork:
      return "minimum-work";
    case MechanismKind::kBoundedOverload:
      return "bounded-overload";
    case MechanismKind::kSieve:
      return "sieve";
    case MechanismKind::kSieveBoundedOverload:
      return "sieve-bounded-overload";
  }
  return "?";
}

inline MechanismKind parse_mechanism(const std::string& s) {
  if (s == "minimum-work" || s == "min-work") return MechanismKind::kMinimumWork;
  if (s == "bounded-overload") return MechanismKind::kBoundedOverload;
  if (s == "sieve") return MechanismKind::kSieve;
  if (s == "sieve-bounded-overload") return MechanismKind::kSieveBoundedOverload;
  throw InvalidArgument("unknown mechanism '" + s + "'");
}

struct MechanismConfig {
  MechanismKind kind = MechanismKind::kMinimumWork;
  double c = 7.0;                 // overload factor
  std::optional<double> beta;     // reserve, sieve kinds
  double delta = 2.0 / 3.0;       // partition, two-stage kind
  std::optional<double> k;        // sieve parameter for the reserve tuning

  bool uses_reserve() const {
    return kind == MechanismKind::kSieve ||
           kind == MechanismKind::kSieveBoundedOverload;
  }

  void validate() const {
    detail::require(c > 1, "mechanism: overload c must be > 1");
    detail::require(delta > 0 && delta < 1, "mechanism: delta must be in (0, 1)");
    detail::require(!beta || *beta >= 0, "mechanism: beta must be >= 0");
    detail::require(!k || *k > 0, "mechanism: k must be > 0");
  }
};

enum class Stage { kNone, kSieve, kOverload, kUnscheduled };

struct Outcome {
  Schedule schedule;
  // Absent when payments were skipped or a pivot was infeasible.
  std::optional<std::vector<double>> payments;
  std::string payment_error;
  // 1-based preference rank of each job's machine; 0 when unscheduled.
  std::vector<int> ranks;
  // Two-stage kind only; empty otherwise.
  std::vector<Stage> stages;
  int cap = 0;  // capacity in force (the overload stage's for the two-stage kind)
  int sieve_machines = 0;
  double stage1_makespan = 0.0;
  double stage2_makespan = 0.0;
  int stage2_jobs = 0;

  const std::vector<double>& require_payments() const {
    if (!payments) throw PivotInfeasibleError(payment_error);
    return *payments;
  }
};

enum class Payments { kCompute, kSkip };

// ceil(x) that ignores floating noise just above an integer.
inline int ceil_count(double x) {
  return static_cast<int>(std::ceil(x - 1e-9));
}

// Per-machine job cap ceil(c n / m).
inline int overload_cap(double c, int n, int m) {
  return std::max(1, ceil_count(c * n / m));
}

// Sieve-stage machine count ceil((1 - delta) m).
inline int sieve_set_size(double delta, int m) {
  return ceil_count((1.0 - delta) * m);
}

namespace detail {

// Optimal objective without the tie-breaking pass.
inline double min_work_objective(const Instance& inst,
                                 const RangeConstraint& rc) {
  const auto machines = available_machines(inst, rc);
  check_range(inst, rc, machines);
  double total = 0.0;
  std::vector<int> loads(static_cast<std::size_t>(inst.m()), 0);
  bool fits = true;
  for (int j = 0; j < inst.n() && fits; ++j) {
    int best = -1;
    double best_cost = rc.reserve ? *rc.reserve
                                  : std::numeric_limits<double>::infinity();
    for (int i : machines) {
      if (inst.runtime(j, i) < best_cost ||
          (best == -1 && inst.runtime(j, i) == best_cost)) {
        best_cost = inst.runtime(j, i);
        best = i;
      }
    }
    total += best_cost;
    if (best >= 0 && rc.cap && ++loads[best] > *rc.cap) fits = false;
  }
  if (fits) return total;
  WorkProblem p;
  p.inst = &inst;
  p.jobs.resize(static_cast<std::size_t>(inst.n()));
  std::iota(p.jobs.begin(), p.jobs.end(), 0);
  p.machines = machines;
  p.capacity.assign(machines.size(), *rc.cap);
  p.reserve = rc.reserve;
  const auto sol = solve_flow(p);
  if (!sol) throw InfeasibleError("min work: no feasible schedule");
  return sol->objective;
}

// Clarke pivot payments for the machines of `range` on inst.
inline std::vector<double> clarke_payments(const Instance& inst,
                                           const RangeConstraint& range,
                                           const Schedule& chosen) {
  std::vector<double> pay(static_cast<std::size_t>(inst.m()), 0.0);
  for (int i : available_machines(inst, range)) {
    RangeConstraint without = range;
    without.excluded.push_back(i);
    double pivot = 0.0;
    try {
      pivot = min_work_objective(inst, without);
    } catch (const InfeasibleError& e) {
      throw PivotInfeasibleError("pivot without machine " + std::to_string(i) +
                                 ": " + e.what());
    }
    const double p = pivot - (chosen.objective - chosen.works[i]);
    pay[i] = (p < 0 && p > -kWorkTolerance) ? 0.0 : p;
  }
  return pay;
}

inline std::vector<int> placement_ranks(const Instance& inst,
                                        const Schedule& s) {
  std::vector<int> ranks(static_cast<std::size_t>(inst.n()), 0);
  for (int j = 0; j < inst.n(); ++j) {
    if (s.scheduled(j)) ranks[j] = inst.rank_of(j, s.assignment[j]);
  }
  return ranks;
}

inline Outcome vcg_outcome(const Instance& inst, const RangeConstraint& range,
                           Payments mode) {
  Outcome out;
  out.schedule = solve_min_work(inst, range);
  out.ranks = placement_ranks(inst, out.schedule);
  out.cap = range.cap.value_or(0);
  if (mode == Payments::kCompute) {
    try {
      out.payments = clarke_payments(inst, range, out.schedule);
    } catch (const PivotInfeasibleError& e) {
      out.payment_error = e.what();
    }
  }
  return out;
}

}  // namespace detail

// VCG over every schedule. With one machine the pivot does not exist: the
// schedule is returned and payment_error is set.
inline Outcome run_minimum_work(const Instance& inst,
                                Payments mode = Payments::kCompute) {
  return detail::vcg_outcome(inst, {}, mode);
}

inline Outcome run_bounded_overload(const Instance& inst, double c,
                                    Payments mode = Payments::kCompute) {
  detail::require(c > 1, "bounded overload: c must be > 1");
  RangeConstraint range;
  range.cap = overload_cap(c, inst.n(), inst.m());
  return detail::vcg_outcome(inst, range, mode);
}

inline Outcome run_sieve(const Instance& inst, double beta,
                         Payments mode = Payments::kCompute) {
  detail::require(beta >= 0, "sieve: beta must be >= 0");
  RangeConstraint range;
  range.reserve = beta;
  return detail::vcg_outcome(inst, range, mode);
}

inline Outcome run_sieve_bounded_overload(const Instance& inst, double c,
                                          double beta, double delta,
                                          Payments mode = Payments::kCompute) {
  detail::require(c > 1, "sieve+overload: c must be > 1");
  detail::require(beta >= 0, "sieve+overload: beta must be >= 0");
  detail::require(delta > 0 && delta < 1, "sieve+overload: delta in (0, 1)");
  const int m = inst.m();
  const int first = sieve_set_size(delta, m);
  if (first < 1 || first >= m) {
    throw InvalidArgument("sieve+overload: delta=" + std::to_string(delta) +
                          " with m=" + std::to_string(m) +
                          " leaves a machine set empty");
  }
  std::vector<int> sieve_set(static_cast<std::size_t>(first));
  std::iota(sieve_set.begin(), sieve_set.end(), 0);
  std::vector<int> overload_set(static_cast<std::size_t>(m - first));
  std::iota(overload_set.begin(), overload_set.end(), first);

  RangeConstraint sieve_range;
  sieve_range.reserve = beta;
  sieve_range.excluded = overload_set;
  const Schedule stage1 = solve_min_work(inst, sieve_range);

  Outcome out;
  out.sieve_machines = first;
  out.stages.assign(static_cast<std::size_t>(inst.n()), Stage::kSieve);
  std::vector<int> assignment = stage1.assignment;
  std::vector<int> leftover;
  for (int j = 0; j < inst.n(); ++j) {
    if (!stage1.scheduled(j)) leftover.push_back(j);
  }
  for (int i : sieve_set) {
    out.stage1_makespan = std::max(out.stage1_makespan, stage1.works[i]);
  }
  out.stage2_jobs = static_cast<int>(leftover.size());

  std::optional<Instance> sub;
  RangeConstraint overload_range;
  Schedule stage2;
  if (!leftover.empty()) {
    sub.emplace(inst.select_jobs(leftover));
    overload_range.cap = overload_cap(c, static_cast<int>(leftover.size()),
                                      static_cast<int>(overload_set.size()));
    overload_range.excluded = sieve_set;
    stage2 = solve_min_work(*sub, overload_range);
    for (std::size_t s = 0; s < leftover.size(); ++s) {
      assignment[leftover[s]] = stage2.assignment[s];
      out.stages[leftover[s]] = Stage::kOverload;
    }
    for (int i : overload_set) {
      out.stage2_makespan = std::max(out.stage2_makespan, stage2.works[i]);
    }
    out.cap = *overload_range.cap;
  }

  out.schedule = make_schedule(inst, std::move(assignment));
  for (int j = 0; j < inst.n(); ++j) {
    if (!out.schedule.scheduled(j)) out.stages[j] = Stage::kUnscheduled;
  }
  out.ranks = detail::placement_ranks(inst, out.schedule);

  if (mode == Payments::kCompute) {
    try {
      std::vector<double> pay =
          detail::clarke_payments(inst, sieve_range, stage1);
      if (sub) {
        const auto second =
            detail::clarke_payments(*sub, overload_range, stage2);
        for (int i : overload_set) pay[i] = second[i];
      }
      out.payments = std::move(pay);
    } catch (const PivotInfeasibleError& e) {
      out.payment_error = e.what();
    }
  }
  return out;
}

// Dispatches on config.kind. Sieve kinds need config.beta resolved.
inline Outcome run_mechanism(const MechanismConfig& config,
                             const Instance& inst,
                             Payments mode = Payments::kCompute) {
  config.validate();
  if (config.uses_reserve() && !config.beta) {
    throw ConfigError(to_string(config.kind) + " needs a resolved reserve");
  }
  switch (config.kind) {
    case MechanismKind::kMinimumWork:
      return run_minimum_work(inst, mode);
    case MechanismKind::kBoundedOverload:
      return run_bounded_overload(inst, config.c, mode);
    case MechanismKind::kSieve:
      return run_sieve(inst, *config.beta, mode);
    case MechanismKind::kSieveBoundedOverload:
      return run_sieve_bounded_overload(inst, config.c, *config.beta,
                                        config.delta, mode);
  }
  throw InvalidArgument("unknown mechanism kind");
}

// ---------------------------------------------------------------------------
// Reserve tuning.

enum class ReserveTuning { kTheorem2, kTheorem3, kLemma6 };

inline ReserveTuning parse_tuning(const std::string& s) {
  if (s == "thm2") return ReserveTuning::kTheorem2;
  if (s == "thm3") return ReserveTuning::kTheorem3;
  if (s == "lemma6") return ReserveTuning::kLemma6;
  throw InvalidArgument("unknown reserve tuning '" + s + "'");
}

struct ReserveDerivation {
  double beta = 0.0;
  int draws = 0;       // k in E[min of k draws]
  MinEstimate tau;     // that expectation
  std::string warning;
};

// Draw count round(x) with a floor of one.
inline int rounded_count(double x) {
  return std::max(1, static_cast<int>(std::llround(x)));
}

// thm2:   beta = n / (m ln m) * E[min of round(delta m / 2)]
// thm3:   beta = 2n / (m ln m) * E[min of round(delta m / 2)]
// lemma6: beta = n / (k m) * E[min of m]
// Natural logarithms throughout. `rng` is only consulted for families whose
// expected minimum has no closed form.
inline ReserveDerivation derive_reserve(const DistributionSpec& spec, int n,
                                        int m, double delta,
                                        ReserveTuning variant,
                                        std::optional<double> k = std::nullopt,
                                        Rng* rng = nullptr,
                                        std::size_t budget = kDefaultMinBudget) {
  detail::require(n >= 1 && m >= 1, "derive_reserve: n, m must be >= 1");
  ReserveDerivation d;
  if (variant == ReserveTuning::kLemma6) {
    detail::require(k.has_value() && *k > 0, "derive_reserve: lemma6 needs k > 0");
    d.draws = m;
    d.tau = expected_min(spec, m, rng, budget);
    d.beta = n / (*k * m) * d.tau.value;
    if (*k >= std::log(static_cast<double>(m))) {
      d.warning = "k >= ln m; the unscheduled-count tuning assumes k < ln m";
    }
    return d;
  }
  detail::require(m >= 2, "derive_reserve: thm2 and thm3 need m >= 2");
  detail::require(delta > 0 && delta < 1, "derive_reserve: delta in (0, 1)");
  d.draws = rounded_count(delta * m / 2.0);
  d.tau = expected_min(spec, d.draws, rng, budget);
  const double log_m = std::log(static_cast<double>(m));
  const double scale = variant == ReserveTuning::kTheorem3 ? 2.0 : 1.0;
  d.beta = scale * n / (m * log_m) * d.tau.value;
  if (variant == ReserveTuning::kTheorem3 && n < m * log_m) {
    d.warning = "n < m ln m; the large-load tuning assumes n >= m ln m";
  }
  return d;
}

// delta = 1 / ln ln m, the partition of the large-load tuning.
inline double large_load_delta(int m) {
  detail::require(m >= 16, "large_load_delta: needs ln ln m > 1 (m >= 16)");
  return 1.0 / std::log(std::log(static_cast<double>(m)));
}

// ---------------------------------------------------------------------------
// Last-entry diagnostic and its geometric envelope.

struct LastEntryProbe {
  int rank = 0;     // L_j
  int machine = 0;  // where the job lands
  double runtime = 0.0;
};

// Runs bounded overload with the given cap on every job except j, then places
// j on the first machine in its preference list with fewer than cap jobs.
inline LastEntryProbe last_entry_with_cap(const Instance& inst, int cap, int j) {
  detail::require(cap >= 1, "last entry: cap must be >= 1");
  detail::require(j >= 0 && j < inst.n(), "last entry: job out of range");
  std::vector<int> loads(static_cast<std::size_t>(inst.m()), 0);
  if (inst.n() > 1) {
    std::vector<int> others;
    for (int o = 0; o < inst.n(); ++o) {
      if (o != j) others.push_back(o);
    }
    RangeConstraint range;
    range.cap = cap;
    loads = solve_min_work(inst.select_jobs(others), range).loads;
  }
  const auto pref = inst.preference(j);
  for (std::size_t r = 0; r < pref.size(); ++r) {
    if (loads[pref[r]] < cap) {
      return {static_cast<int>(r) + 1, pref[r], inst.runtime(j, pref[r])};
    }
  }
  throw InfeasibleError("last entry: every machine is full");
}

// The cap is ceil(c n / m), computed for all n jobs.
inline LastEntryProbe last_entry(const Instance& inst, double c, int j) {
  detail::require(c > 1, "last entry: c must be > 1");
  return last_entry_with_cap(inst, overload_cap(c, inst.n(), inst.m()), j);
}

inline int last_entry_rank(const Instance& inst, double c, int j) {
  return last_entry(inst, c, j).rank;
}

// ceil(m / c): the worst rank last entry can ever need.
inline int rank_cap(double c, int m) { return std::max(1, ceil_count(m / c)); }

// Pr[R = i] for i = 1..ceil(m/c): (1 - 1/c) / c^(i-1) below the cap, the
// remaining mass on the cap.
inline std::vector<double> geometric_rank_pmf(double c, int m) {
  detail::require(c > 1 && m >= 1, "geometric rank: need c > 1, m >= 1");
  const int top = rank_cap(c, m);
  std::vector<double> pmf(static_cast<std::size_t>(top));
  double used = 0.0;
  for (int i = 1; i < top; ++i) {
    pmf[i - 1] = (1.0 - 1.0 / c) / std::pow(c, i - 1);
    used += pmf[i - 1];
  }
  pmf[top - 1] = 1.0 - used;
  return pmf;
}

inline int sample_geometric_rank(double c, int m, Rng& rng) {
  const auto pmf = geometric_rank_pmf(c, m);
  const double u = uniform01(rng);
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
    cum += pmf[i];
    if (u < cum) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(pmf.size());
}

// ---------------------------------------------------------------------------
// Incentive-compatibility audit.

struct Misreport {
  std::string label;
  std::vector<double> column;  // reported runtimes of every job
};

struct Violation {
  std::string label;
  double gain = 0.0;
};

struct AuditResult {
  int machine = 0;
  double truthful_utility = 0.0;
  int misreports = 0;
  int skipped = 0;  // misreports whose pivot was infeasible
  std::vector<Violation> violations;
};

inline constexpr double kAuditTolerance = 1e-9;

using MisreportGenerator =
    std::function<std::vector<Misreport>(const Instance&, int machine)>;

// Scalings by {0, 1/4, 1/2, 2, 4, sentinel} of the whole column and of each
// entry, plus every pairwise swap. The sentinel stands in for "infinite":
// far above every true runtime but small enough to keep sums exact to 1e-9.
inline std::vector<Misreport> default_misreports(const Instance& inst,
                                                 int machine) {
  const std::vector<double> truth = inst.column(machine);
  const double top =
      *std::max_element(inst.runtimes().begin(), inst.runtimes().end());
  const double sentinel = 1e3 * (1.0 + top);
  struct Factor {
    const char* name;
    double value;
    bool is_sentinel;
  };
  const Factor factors[] = {{"x0", 0.0, false},  {"x1/4", 0.25, false},
                            {"x1/2", 0.5, false}, {"x2", 2.0, false},
                            {"x4", 4.0, false},   {"inf", 0.0, true}};
  std::vector<Misreport> out;
  out.push_back({"truthful", truth});
  for (const auto& f : factors) {
    std::vector<double> col = truth;
    for (double& v : col) v = f.is_sentinel ? sentinel : v * f.value;
    out.push_back({std::string("all ") + f.name, std::move(col)});
    for (std::size_t j = 0; j < truth.size(); ++j) {
      std::vector<double> one = truth;
      one[j] = f.is_sentinel ? sentinel : one[j] * f.value;
      out.push_back({"job " + std::to_string(j) + " " + f.name, std::move(one)});
    }
  }
  for (std::size_t a = 0; a < truth.size(); ++a) {
    for (std::size_t b = a + 1; b < truth.size(); ++b) {
      std::vector<double> col = truth;
      std::swap(col[a], col[b]);
      out.push_back({"swap " + std::to_string(a) + "," + std::to_string(b),
                     std::move(col)});
    }
  }
  return out;
}

// Utility of `machine` under outcome `o`: payment minus the true work of the
// jobs it receives.
inline double machine_utility(const Instance& truth, const Outcome& o,
                              int machine) {
  double work = 0.0;
  for (int j = 0; j < truth.n(); ++j) {
    if (o.schedule.assignment[j] == machine) work += truth.runtime(j, machine);
  }
  return o.require_payments()[machine] - work;
}

// Replays the mechanism under every candidate report of `machine` and lists
// those that beat truthful reporting by more than kAuditTolerance. This is a
// falsification harness over a finite grid, not a proof.
inline AuditResult ic_audit(const MechanismConfig& config, const Instance& inst,
                            int machine,
                            const MisreportGenerator& generator =
                                default_misreports) {
  detail::require(machine >= 0 && machine < inst.m(),
                  "ic_audit: machine out of range");
  AuditResult result;
  result.machine = machine;
  const Outcome truthful = run_mechanism(config, inst);
  result.truthful_utility = machine_utility(inst, truthful, machine);
  for (const auto& report : generator(inst, machine)) {
    ++result.misreports;
    const Outcome o =
        run_mechanism(config, inst.with_column(machine, report.column));
    if (!o.payments) {
      ++result.skipped;
      continue;
    }
    const double gain =
        machine_utility(inst, o, machine) - result.truthful_utility;
    if (gain > kAuditTolerance) result.violations.push_back({report.label, gain});
  }
  return result;
}

}  // namespace pisched

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

// Minimum-total-work assignment over a restricted range of schedules.
//
// The range is described by a RangeConstraint: an optional per-machine job
// cap, an optional reserve (a dummy machine of runtime beta for every job with
// unbounded capacity; dummy-assigned jobs are unscheduled) and a set of
// machines that may not be used. solve_min_work returns an exact optimum and
// breaks ties among optima lexicographically: job 0 goes to its lowest-index
// optimal machine, then job 1, and so on, with the dummy ranked after every
// real machine. brute_force_min_work enumerates the same range in the same
// order and serves as the oracle.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pisched/detail/min_cost_flow.hpp"
#include "pisched/error.hpp"
#include "pisched/instance.hpp"

namespace pisched {

// Absolute tolerance for total-work comparisons.
inline constexpr double kWorkTolerance = 1e-9;
inline constexpr std::uint64_t kEnumerationLimit = 1'000'000;

struct Schedule {
  static constexpr int kUnscheduled = -1;

  std::vector<int> assignment;  // machine per job, or kUnscheduled
  std::vector<int> loads;       // jobs per machine
  std::vector<double> works;    // summed runtimes per machine
  double total_work = 0.0;
  double makespan = 0.0;
  // total_work plus the reserve charged for every unscheduled job.
  double objective = 0.0;

  int max_load() const {
    return loads.empty() ? 0 : *std::max_element(loads.begin(), loads.end());
  }
  int unscheduled() const {
    return static_cast<int>(
        std::count(assignment.begin(), assignment.end(), kUnscheduled));
  }
  bool scheduled(int j) const { return assignment[j] != kUnscheduled; }
};

struct RangeConstraint {
  std::optional<int> cap;
  std::optional<double> reserve;
  std::vector<int> excluded;

  void validate() const {
    detail::require(!cap || *cap >= 1, "range: cap must be >= 1");
    detail::require(!reserve || *reserve >= 0, "range: reserve must be >= 0");
  }
};

// Loads, works and totals of an assignment on inst.
inline Schedule make_schedule(const Instance& inst, std::vector<int> assignment,
                              std::optional<double> reserve = std::nullopt) {
  Schedule s;
  s.loads.assign(static_cast<std::size_t>(inst.m()), 0);
  s.works.assign(static_cast<std::size_t>(inst.m()), 0.0);
  double charged = 0.0;
  for (int j = 0; j < inst.n(); ++j) {
    const int i = assignment[j];
    if (i == Schedule::kUnscheduled) {
      charged += reserve.value_or(0.0);
      continue;
    }
    ++s.loads[i];
    s.works[i] += inst.runtime(j, i);
  }
  s.assignment = std::move(assignment);
  for (double w : s.works) {
    s.total_work += w;
    s.makespan = std::max(s.makespan, w);
  }
  s.objective = s.total_work + charged;
  return s;
}

namespace detail {

// A min-work problem over a subset of jobs and the available machines. The
// dummy (when present) has local machine index machines.size().
struct WorkProblem {
  const Instance* inst = nullptr;
  std::vector<int> jobs;
  std::vector<int> machines;
  std::vector<int> capacity;  // per local machine
  std::optional<double> reserve;

  int job_count() const { return static_cast<int>(jobs.size()); }
  int machine_count() const { return static_cast<int>(machines.size()); }
  int choice_count() const { return machine_count() + (reserve ? 1 : 0); }
  bool is_dummy(int local) const { return local == machine_count(); }

  double cost(int job_local, int machine_local) const {
    if (is_dummy(machine_local)) return *reserve;
    return inst->runtime(jobs[job_local], machines[machine_local]);
  }
};

struct FlowSolution {
  std::vector<int> choice;  // local machine per local job
  double objective = 0.0;
  std::vector<double> job_pot;
  std::vector<double> machine_pot;
};

inline std::optional<FlowSolution> solve_flow(const WorkProblem& p) {
  const int nj = p.job_count();
  const int nc = p.choice_count();
  const int source = 0;
  const int sink = 1 + nj + nc;
  MinCostFlow flow(sink + 1);
  std::vector<int> arc_of(static_cast<std::size_t>(nj) * nc);
  for (int j = 0; j < nj; ++j) {
    flow.add_arc(source, 1 + j, 1, 0.0);
    for (int c = 0; c < nc; ++c) {
      arc_of[static_cast<std::size_t>(j) * nc + c] =
          flow.add_arc(1 + j, 1 + nj + c, 1, p.cost(j, c));
    }
  }
  for (int c = 0; c < nc; ++c) {
    const int cap = p.is_dummy(c) ? nj : p.capacity[c];
    if (cap > 0) flow.add_arc(1 + nj + c, sink, cap, 0.0);
  }
  if (flow.run(source, sink, nj) < nj) return std::nullopt;

  FlowSolution sol;
  sol.choice.assign(static_cast<std::size_t>(nj), -1);
  for (int j = 0; j < nj; ++j) {
    for (int c = 0; c < nc; ++c) {
      if (flow.arc(arc_of[static_cast<std::size_t>(j) * nc + c]).flow > 0) {
        sol.choice[j] = c;
        sol.objective += p.cost(j, c);
        break;
      }
    }
  }
  sol.job_pot.resize(static_cast<std::size_t>(nj));
  sol.machine_pot.resize(static_cast<std::size_t>(nc));
  for (int j = 0; j < nj; ++j) sol.job_pot[j] = flow.potential(1 + j);
  for (int c = 0; c < nc; ++c) sol.machine_pot[c] = flow.potential(1 + nj + c);
  return sol;
}

// Walks jobs in order and moves each to its lowest-index machine that still
// admits an optimal completion. Only arcs that are tight under the optimal
// dual can carry flow in any optimum, so most jobs have a single candidate
// and need no re-solve.
inline std::vector<int> lexicographic_refine(const WorkProblem& p,
                                             FlowSolution sol) {
  const int nj = p.job_count();
  const int nc = p.choice_count();
  const double optimum = sol.objective;
  std::vector<int> current = sol.choice;
  std::vector<int> left = p.capacity;  // capacity after fixed jobs
  double fixed_cost = 0.0;

  for (int j = 0; j < nj; ++j) {
    std::vector<int> candidates;
    for (int c = 0; c < nc; ++c) {
      const double reduced =
          p.cost(j, c) + sol.job_pot[j] - sol.machine_pot[c];
      if (reduced <= kWorkTolerance) candidates.push_back(c);
    }
    int chosen = current[j];
    for (int c : candidates) {
      if (c == current[j]) break;
      if (!p.is_dummy(c) && left[c] == 0) continue;
      WorkProblem rest{p.inst, {}, p.machines, left, p.reserve};
      rest.jobs.assign(p.jobs.begin() + j + 1, p.jobs.end());
      if (!p.is_dummy(c)) --rest.capacity[c];
      double tail_cost = 0.0;
      std::vector<int> tail;
      if (!rest.jobs.empty()) {
        auto sub = solve_flow(rest);
        if (!sub) continue;
        tail_cost = sub->objective;
        tail = std::move(sub->choice);
      }
      if (fixed_cost + p.cost(j, c) + tail_cost <= optimum + kWorkTolerance) {
        chosen = c;
        std::copy(tail.begin(), tail.end(), current.begin() + j + 1);
        break;
      }
    }
    current[j] = chosen;
    fixed_cost += p.cost(j, chosen);
    if (!p.is_dummy(chosen)) --left[chosen];
  }
  return current;
}

inline std::vector<int> available_machines(const Instance& inst,
                                           const RangeConstraint& rc) {
  std::vector<int> out;
  for (int i = 0; i < inst.m(); ++i) {
    if (std::find(rc.excluded.begin(), rc.excluded.end(), i) ==
        rc.excluded.end()) {
      out.push_back(i);
    }
  }
  return out;
}

inline void check_range(const Instance& inst, const RangeConstraint& rc,
                        const std::vector<int>& machines) {
  rc.validate();
  if (rc.reserve) return;
  if (machines.empty()) throw InfeasibleError("min work: empty machine set");
  if (rc.cap && static_cast<std::int64_t>(*rc.cap) *
                        static_cast<std::int64_t>(machines.size()) <
                    inst.n()) {
    throw InfeasibleError("min work: cap " + std::to_string(*rc.cap) + " x " +
                          std::to_string(machines.size()) +
                          " machines cannot hold " + std::to_string(inst.n()) +
                          " jobs");
  }
}

}  // namespace detail

// Exact minimum-total-work schedule within the constrained range.
inline Schedule solve_min_work(const Instance& inst,
                               const RangeConstraint& rc = {}) {
  const auto machines = detail::available_machines(inst, rc);
  detail::check_range(inst, rc, machines);

  // Per-job argmin, lowest index on ties, dummy only when strictly better.
  std::vector<int> greedy(static_cast<std::size_t>(inst.n()),
                          Schedule::kUnscheduled);
  std::vector<int> loads(static_cast<std::size_t>(inst.m()), 0);
  bool fits = true;
  for (int j = 0; j < inst.n(); ++j) {
    int best = Schedule::kUnscheduled;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i : machines) {
      if (inst.runtime(j, i) < best_cost) {
        best_cost = inst.runtime(j, i);
        best = i;
      }
    }
    if (rc.reserve && !(best_cost <= *rc.reserve)) best = Schedule::kUnscheduled;
    greedy[j] = best;
    if (best != Schedule::kUnscheduled && rc.cap && ++loads[best] > *rc.cap) {
      fits = false;
    }
  }
  if (fits) return make_schedule(inst, std::move(greedy), rc.reserve);

  detail::WorkProblem p;
  p.inst = &inst;
  p.jobs.resize(static_cast<std::size_t>(inst.n()));
  std::iota(p.jobs.begin(), p.jobs.end(), 0);
  p.machines = machines;
  p.capacity.assign(machines.size(), *rc.cap);
  p.reserve = rc.reserve;
  auto sol = detail::solve_flow(p);
  if (!sol) throw InfeasibleError("min work: no feasible schedule");
  const auto local = detail::lexicographic_refine(p, std::move(*sol));
  std::vector<int> assignment(static_cast<std::size_t>(inst.n()));
  for (int j = 0; j < inst.n(); ++j) {
    assignment[j] = p.is_dummy(local[j]) ? Schedule::kUnscheduled
                                         : machines[local[j]];
  }
  return make_schedule(inst, std::move(assignment), rc.reserve);
}

// Exhaustive oracle for solve_min_work. Enumerates assignments in
// lexicographic order (job 0 most significant, dummy last) and keeps the
// first one whose objective is minimal up to kWorkTolerance.
inline Schedule brute_force_min_work(const Instance& inst,
                                     const RangeConstraint& rc = {}) {
  const auto machines = detail::available_machines(inst, rc);
  detail::check_range(inst, rc, machines);
  std::vector<int> choices = machines;
  if (rc.reserve) choices.push_back(Schedule::kUnscheduled);
  const double space = std::pow(static_cast<double>(choices.size()), inst.n());
  if (space > static_cast<double>(kEnumerationLimit)) {
    throw TooLargeError("brute force: " + std::to_string(choices.size()) +
                        "^" + std::to_string(inst.n()) +
                        " assignments exceed the enumeration limit");
  }

  const int n = inst.n();
  std::vector<int> current(static_cast<std::size_t>(n));
  std::vector<int> best;
  std::vector<int> loads(static_cast<std::size_t>(inst.m()), 0);
  double best_cost = std::numeric_limits<double>::infinity();
  auto cost_of = [&](int j, int i) {
    return i == Schedule::kUnscheduled ? *rc.reserve : inst.runtime(j, i);
  };
  auto visit = [&](auto&& self, int j, double partial) -> void {
    if (j == n) {
      if (partial < best_cost - kWorkTolerance) {
        best_cost = partial;
        best = current;
      }
      return;
    }
    for (int i : choices) {
      if (i != Schedule::kUnscheduled && rc.cap && loads[i] >= *rc.cap) {
        continue;
      }
      current[j] = i;
      if (i != Schedule::kUnscheduled) ++loads[i];
      self(self, j + 1, partial + cost_of(j, i));
      if (i != Schedule::kUnscheduled) --loads[i];
    }
  };
  visit(visit, 0, 0.0);
  if (best.empty()) throw InfeasibleError("brute force: no feasible schedule");
  return make_schedule(inst, std::move(best), rc.reserve);
}

// Minimum makespan over every assignment, ignoring incentives.
inline double first_best_makespan_exact(const Instance& inst) {
  const double space = std::pow(static_cast<double>(inst.m()), inst.n());
  if (space > static_cast<double>(kEnumerationLimit)) {
    throw TooLargeError("first-best: instance too large to enumerate");
  }
  const int n = inst.n();
  std::vector<double> works(static_cast<std::size_t>(inst.m()), 0.0);
  double best = std::numeric_limits<double>::infinity();
  auto visit = [&](auto&& self, int j, double partial_max) -> void {
    if (partial_max >= best) return;
    if (j == n) {
      best = partial_max;
      return;
    }
    for (int i = 0; i < inst.m(); ++i) {
      works[i] += inst.runtime(j, i);
      self(self, j + 1, std::max(partial_max, works[i]));
      works[i] -= inst.runtime(j, i);
    }
  };
  visit(visit, 0, 0.0);
  return best;
}

// Longest-best-runtime-first list scheduling; an upper bound on the
// first-best makespan.
inline double first_best_makespan_greedy(const Instance& inst) {
  std::vector<int> order(static_cast<std::size_t>(inst.n()));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> best(static_cast<std::size_t>(inst.n()));
  for (int j = 0; j < inst.n(); ++j) best[j] = best_runtime(inst, j);
  std::stable_sort(order.begin(), order.end(),
                   [&best](int a, int b) { return best[a] > best[b]; });
  std::vector<double> works(static_cast<std::size_t>(inst.m()), 0.0);
  for (int j : order) {
    int target = 0;
    for (int i = 1; i < inst.m(); ++i) {
      if (works[i] + inst.runtime(j, i) <
          works[target] + inst.runtime(j, target)) {
        target = i;
      }
    }
    works[target] += inst.runtime(j, target);
  }
  return *std::max_element(works.begin(), works.end());
}

}  // namespace pisched

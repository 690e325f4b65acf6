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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "pisched/assign.hpp"
#include "pisched/diagnostics.hpp"
#include "pisched/distribution.hpp"
#include "pisched/error.hpp"
#include "pisched/instance.hpp"
#include "pisched/mechanism.hpp"
#include "pisched/random.hpp"

namespace pisched {
namespace {

// Clarke payment by enumeration: best total work without machine i, minus
// the others' work in the chosen schedule.
double enumerated_payment(const Instance& inst, const RangeConstraint& rc,
                          const Schedule& chosen, int i) {
  RangeConstraint without = rc;
  without.excluded.push_back(i);
  return brute_force_min_work(inst, without).objective -
         (chosen.objective - chosen.works[i]);
}

TEST(MinimumWorkTest, PaymentsExample) {
  const auto inst = Instance::from_rows({{1, 3}, {2, 2}});
  const auto o = run_minimum_work(inst);
  EXPECT_EQ(o.schedule.assignment, (std::vector<int>{0, 0}));
  ASSERT_TRUE(o.payments);
  EXPECT_NEAR((*o.payments)[0], 5.0, 1e-12);
  EXPECT_NEAR((*o.payments)[1], 0.0, 1e-12);
  EXPECT_EQ(o.ranks, (std::vector<int>{1, 1}));
}

TEST(MinimumWorkTest, SingleMachineHasNoPivot) {
  const auto inst = Instance::from_rows({{1}, {2}});
  const auto o = run_minimum_work(inst);
  EXPECT_DOUBLE_EQ(o.schedule.makespan, 3.0);
  EXPECT_FALSE(o.payments);
  EXPECT_FALSE(o.payment_error.empty());
  EXPECT_THROW(o.require_payments(), PivotInfeasibleError);
}

TEST(MinimumWorkTest, ZeroMatrixPaysNothing) {
  const auto inst = Instance::from_rows({{0, 0, 0}, {0, 0, 0}});
  const auto o = run_minimum_work(inst);
  for (double p : o.require_payments()) EXPECT_EQ(p, 0.0);
}

TEST(BoundedOverloadTest, NonBindingCapMatchesMinimumWork) {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto inst = sample_instance(DistributionSpec::exponential(1), 4, 4, rng);
    const auto bo = run_bounded_overload(inst, 7.0);
    EXPECT_EQ(bo.cap, 7);
    EXPECT_EQ(bo.schedule.assignment, run_minimum_work(inst).schedule.assignment);
  }
}

TEST(BoundedOverloadTest, AdversarialCap) {
  const auto inst =
      Instance::from_rows({{1, 5, 6, 7}, {1, 5, 6, 7}, {1, 5, 6, 7}, {1, 5, 6, 7}});
  const auto o = run_bounded_overload(inst, 2.0);
  EXPECT_EQ(o.cap, 2);
  EXPECT_EQ(o.schedule.loads[0], 2);
  EXPECT_LE(o.schedule.max_load(), 2);
}

TEST(BoundedOverloadTest, PaymentsExample) {
  // c = 2, n = m = 2 gives cap ceil(2 * 1) = 2, so both jobs fit on machine 0.
  // Pivots by enumeration: without m0 both jobs run on m1 for 110; without m1
  // the schedule is unchanged at 3.
  const auto inst = Instance::from_rows({{1, 10}, {2, 100}});
  const auto o = run_bounded_overload(inst, 2.0);
  EXPECT_EQ(o.cap, 2);
  EXPECT_EQ(o.schedule.assignment, (std::vector<int>{0, 0}));
  const auto& pay = o.require_payments();
  EXPECT_NEAR(pay[0], 110.0, 1e-12);
  EXPECT_NEAR(pay[1], 0.0, 1e-12);
}

TEST(BoundedOverloadTest, CapOneRangeHasNoPivot) {
  // Cap 1 on two machines: the schedule is {j1 -> m1, j2 -> m0} with total
  // work 12, but dropping either machine leaves two jobs for one slot.
  const auto inst = Instance::from_rows({{1, 10}, {2, 100}});
  RangeConstraint range;
  range.cap = 1;
  const auto o = detail::vcg_outcome(inst, range, Payments::kCompute);
  EXPECT_EQ(o.schedule.assignment, (std::vector<int>{1, 0}));
  EXPECT_DOUBLE_EQ(o.schedule.total_work, 12.0);
  EXPECT_FALSE(o.payments);
  EXPECT_THROW(o.require_payments(), PivotInfeasibleError);
}

TEST(BoundedOverloadTest, InfeasiblePivotIsReported) {
  // c = 1.01, n = 9, m = 3: cap 4; two machines hold only 8 jobs.
  Rng rng(2);
  const auto inst = sample_instance(DistributionSpec::exponential(1), 9, 3, rng);
  const auto o = run_bounded_overload(inst, 1.01);
  EXPECT_EQ(o.cap, 4);
  EXPECT_LE(o.schedule.max_load(), 4);
  EXPECT_FALSE(o.payments);
  EXPECT_THROW(o.require_payments(), PivotInfeasibleError);
  // c = 2 always leaves room: (m - 1) ceil(2n/m) >= n for m >= 2.
  EXPECT_TRUE(run_bounded_overload(inst, 2.0).payments);
}

TEST(SieveTest, ZeroReserve) {
  const auto inst = Instance::from_rows({{0, 3}, {1, 2}, {4, 0.5}});
  const auto o = run_sieve(inst, 0.0);
  EXPECT_TRUE(o.schedule.scheduled(0));
  EXPECT_FALSE(o.schedule.scheduled(1));
  EXPECT_FALSE(o.schedule.scheduled(2));
  EXPECT_EQ(o.ranks[1], 0);
}

TEST(SieveTest, HugeReserveIsMinimumWork) {
  Rng rng(3);
  const auto inst = sample_instance(DistributionSpec::exponential(1), 5, 3, rng);
  EXPECT_EQ(run_sieve(inst, 1e12).schedule.assignment,
            run_minimum_work(inst).schedule.assignment);
}

TEST(SieveTest, ThresholdExample) {
  const auto inst = Instance::from_rows({{3, 9}, {7, 8}});
  const auto o = run_sieve(inst, 5.0);
  EXPECT_EQ(o.schedule.unscheduled(), 1);
  EXPECT_FALSE(o.schedule.scheduled(1));
}

TEST(SieveTest, SingleMachinePivotUsesDummy) {
  const auto inst = Instance::from_rows({{1}, {7}});
  const auto o = run_sieve(inst, 5.0);
  // Without the machine both jobs go to the dummy: pivot 10, others' cost 5.
  EXPECT_NEAR(o.require_payments()[0], 5.0, 1e-12);
}

TEST(CombinedTest, HugeReserveLeavesStageTwoEmpty) {
  Rng rng(4);
  const auto inst = sample_instance(DistributionSpec::exponential(1), 6, 3, rng);
  const auto o = run_sieve_bounded_overload(inst, 7.0, 1e12, 2.0 / 3.0);
  EXPECT_EQ(o.sieve_machines, 1);
  EXPECT_EQ(o.stage2_jobs, 0);
  EXPECT_DOUBLE_EQ(o.stage2_makespan, 0.0);
  for (int j = 0; j < inst.n(); ++j) {
    EXPECT_EQ(o.schedule.assignment[j], 0);
    EXPECT_EQ(o.stages[j], Stage::kSieve);
  }
}

TEST(CombinedTest, PartitionSizes) {
  EXPECT_EQ(sieve_set_size(2.0 / 3.0, 3), 1);
  EXPECT_EQ(sieve_set_size(2.0 / 3.0, 32), 11);
  EXPECT_EQ(sieve_set_size(0.5, 12), 6);
  const auto inst = Instance::from_rows({{1, 2}, {3, 4}});
  EXPECT_THROW(run_sieve_bounded_overload(inst, 7, 1, 0.1), InvalidArgument);
}

TEST(CombinedTest, EveryJobScheduledByOneStage) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto inst = sample_instance(DistributionSpec::exponential(1), 12, 6, rng);
    const auto o = run_sieve_bounded_overload(inst, 2.0, 0.3, 0.5);
    EXPECT_EQ(o.schedule.unscheduled(), 0);
    int second = 0;
    for (int j = 0; j < inst.n(); ++j) {
      const int i = o.schedule.assignment[j];
      if (o.stages[j] == Stage::kSieve) {
        EXPECT_LT(i, o.sieve_machines);
      } else {
        ASSERT_EQ(o.stages[j], Stage::kOverload);
        EXPECT_GE(i, o.sieve_machines);
        ++second;
      }
    }
    EXPECT_EQ(second, o.stage2_jobs);
    for (int i = o.sieve_machines; i < inst.m(); ++i) {
      EXPECT_LE(o.schedule.loads[i], o.cap);
    }
    if (second > 0) {
      EXPECT_EQ(o.cap, std::max(1, static_cast<int>(std::ceil(
                                       2.0 * second / (inst.m() - o.sieve_machines) -
                                       1e-9))));
    }
  }
}

TEST(ReserveTest, Thm2TuningExample) {
  const auto d = derive_reserve(DistributionSpec::exponential(1), 12, 12,
                                2.0 / 3.0, ReserveTuning::kTheorem2);
  EXPECT_EQ(d.draws, 4);
  EXPECT_DOUBLE_EQ(d.tau.value, 0.25);
  EXPECT_NEAR(d.beta, 0.25 / std::log(12.0), 1e-15);
  EXPECT_NEAR(d.beta, 0.10061, 1e-5);
}

TEST(ReserveTest, Thm3TuningDoubles) {
  const auto spec = DistributionSpec::uniform(0, 1);
  const auto two = derive_reserve(spec, 50, 12, 0.5, ReserveTuning::kTheorem2);
  const auto three = derive_reserve(spec, 50, 12, 0.5, ReserveTuning::kTheorem3);
  EXPECT_NEAR(three.beta, 2 * two.beta, 1e-15);
  EXPECT_TRUE(three.warning.empty());
  const auto light = derive_reserve(spec, 12, 12, 0.5, ReserveTuning::kTheorem3);
  EXPECT_FALSE(light.warning.empty());
}

TEST(ReserveTest, LemmaSixExample) {
  const auto d = derive_reserve(DistributionSpec::exponential(1), 100, 10, 0.5,
                                ReserveTuning::kLemma6, 2.0);
  EXPECT_NEAR(d.beta, 0.5, 1e-15);
  EXPECT_TRUE(d.warning.empty());
  const auto big_k = derive_reserve(DistributionSpec::exponential(1), 100, 10,
                                    0.5, ReserveTuning::kLemma6, 3.0);
  EXPECT_FALSE(big_k.warning.empty());
  EXPECT_THROW(derive_reserve(DistributionSpec::exponential(1), 100, 10, 0.5,
                              ReserveTuning::kLemma6),
               InvalidArgument);
}

TEST(ReserveTest, DrawCountRoundsWithFloorOne) {
  const auto d = derive_reserve(DistributionSpec::exponential(1), 4, 2, 0.1,
                                ReserveTuning::kTheorem2);
  EXPECT_EQ(d.draws, 1);
  EXPECT_EQ(rounded_count(22.46), 22);
  EXPECT_EQ(rounded_count(2.5), 3);
}

TEST(ReserveTest, LargeLoadDelta) {
  EXPECT_NEAR(large_load_delta(64), 1.0 / std::log(std::log(64.0)), 1e-15);
  EXPECT_THROW(large_load_delta(8), InvalidArgument);
}

TEST(MechanismConfigTest, DispatchAndValidation) {
  MechanismConfig cfg;
  cfg.kind = MechanismKind::kSieve;
  const auto inst = Instance::from_rows({{1, 2}});
  EXPECT_THROW(run_mechanism(cfg, inst), ConfigError);
  cfg.beta = 3.0;
  EXPECT_EQ(run_mechanism(cfg, inst).schedule.unscheduled(), 0);
  cfg.c = 1.0;
  EXPECT_THROW(run_mechanism(cfg, inst), InvalidArgument);
  for (auto kind : {MechanismKind::kMinimumWork, MechanismKind::kBoundedOverload,
                    MechanismKind::kSieve, MechanismKind::kSieveBoundedOverload}) {
    EXPECT_EQ(parse_mechanism(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_mechanism("vcg"), InvalidArgument);
}

TEST(PaymentTest, MatchEnumeratedClarkePivot) {
  Rng rng(6);
  for (int t = 0; t < 60; ++t) {
    const auto inst = sample_instance(DistributionSpec::two_point(1, 10, 0.4), 5,
                                      3, rng);
    struct Case {
      RangeConstraint rc;
      Outcome o;
    };
    RangeConstraint capped;
    capped.cap = overload_cap(2.0, 5, 3);
    RangeConstraint reserved;
    reserved.reserve = 4.0;
    const std::vector<Case> cases = {{{}, run_minimum_work(inst)},
                                     {capped, run_bounded_overload(inst, 2.0)},
                                     {reserved, run_sieve(inst, 4.0)}};
    for (const auto& c : cases) {
      const auto& pay = c.o.require_payments();
      for (int i = 0; i < inst.m(); ++i) {
        EXPECT_NEAR(pay[i], enumerated_payment(inst, c.rc, c.o.schedule, i), 1e-9);
        EXPECT_GE(pay[i], 0.0);
      }
    }
  }
}

TEST(OutcomeTest, RanksWithinRange) {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const auto inst = sample_instance(DistributionSpec::exponential(1), 10, 4, rng);
    const auto o = run_bounded_overload(inst, 2.0, Payments::kSkip);
    for (int j = 0; j < inst.n(); ++j) {
      EXPECT_GE(o.ranks[j], 1);
      EXPECT_LE(o.ranks[j], inst.m());
      EXPECT_EQ(inst.preference(j)[o.ranks[j] - 1], o.schedule.assignment[j]);
    }
    EXPECT_FALSE(o.payments);
  }
}

TEST(LastEntryTest, NonBindingCapGivesFavourite) {
  Rng rng(8);
  const auto inst = sample_instance(DistributionSpec::exponential(1), 4, 4, rng);
  for (int j = 0; j < 4; ++j) EXPECT_EQ(last_entry_rank(inst, 7.0, j), 1);
}

TEST(LastEntryTest, HandTrace) {
  const auto inst = Instance::from_rows({{1, 10}, {2, 100}});
  const auto probe = last_entry_with_cap(inst, 1, 1);
  EXPECT_EQ(probe.rank, 2);
  EXPECT_EQ(probe.machine, 1);
  EXPECT_DOUBLE_EQ(probe.runtime, 100.0);
}

TEST(LastEntryTest, RankCapAndRuntimeComparison) {
  Rng rng(9);
  for (int t = 0; t < 40; ++t) {
    const auto inst = sample_instance(DistributionSpec::exponential(1), 16, 16, rng);
    for (double c : {1.5, 2.0, 7.0}) {
      const auto cmp = compare_with_last_entry(inst, c);
      EXPECT_EQ(cmp.jobs, 16);
      EXPECT_EQ(cmp.rank_violations, 0);
      EXPECT_EQ(cmp.runtime_violations, 0);
    }
  }
}

TEST(GeometricRankTest, Pmf) {
  const auto pmf = geometric_rank_pmf(7.0, 64);
  ASSERT_EQ(pmf.size(), 10u);
  EXPECT_NEAR(pmf[0], 6.0 / 7.0, 1e-15);
  EXPECT_NEAR(pmf[1], 6.0 / 49.0, 1e-15);
  EXPECT_NEAR(pmf[0], 0.8571, 1e-4);
  EXPECT_NEAR(pmf[1], 0.12245, 1e-5);
  double total = 0.0;
  for (double p : pmf) total += p;
  EXPECT_NEAR(total, 1.0, 1e-15);
  EXPECT_EQ(rank_cap(7.0, 64), 10);
  EXPECT_EQ(rank_cap(7.0, 7), 1);
}

TEST(GeometricRankTest, SmallMachineCountIsDeterministic) {
  Rng rng(10);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(sample_geometric_rank(7.0, 5, rng), 1);
}

TEST(GeometricRankTest, FrequenciesMatchPmf) {
  Rng rng(11);
  const auto r = check_geometric_frequencies(7.0, 64, 1000000, rng);
  EXPECT_TRUE(r.pass) << r.max_abs_z;
}

TEST(GeometricRankTest, LastEntryRankIsDominated) {
  Rng rng(12);
  const auto r = check_rank_dominance(DistributionSpec::exponential(1), 32, 32,
                                      4.0, 3000, rng);
  EXPECT_TRUE(r.pass) << r.max_violation;
  EXPECT_LE(r.max_rank_seen, rank_cap(4.0, 32));
}

TEST(AuditTest, TruthfulReportHasZeroGain) {
  const auto inst = Instance::from_rows({{1, 3}, {2, 2}});
  MechanismConfig cfg;
  const auto r = ic_audit(cfg, inst, 0, [](const Instance& in, int i) {
    return std::vector<Misreport>{{"truthful", in.column(i)}};
  });
  EXPECT_EQ(r.misreports, 1);
  EXPECT_TRUE(r.violations.empty());
}

TEST(AuditTest, MinimumWorkTwoByTwo) {
  Rng rng(13);
  MechanismConfig cfg;
  for (int t = 0; t < 50; ++t) {
    const auto inst = sample_instance(DistributionSpec::exponential(1), 2, 2, rng);
    for (int i = 0; i < 2; ++i) EXPECT_TRUE(ic_audit(cfg, inst, i).violations.empty());
  }
}

TEST(AuditTest, BoundedOverloadFourByThree) {
  Rng rng(14);
  MechanismConfig cfg;
  cfg.kind = MechanismKind::kBoundedOverload;
  cfg.c = 2.0;
  for (int t = 0; t < 30; ++t) {
    const auto inst =
        sample_instance(DistributionSpec::two_point(1, 10, 0.5), 4, 3, rng);
    for (int i = 0; i < 3; ++i) {
      const auto r = ic_audit(cfg, inst, i);
      EXPECT_TRUE(r.violations.empty());
      EXPECT_EQ(r.skipped, 0);
    }
  }
}

TEST(AuditTest, SieveKinds) {
  Rng rng(15);
  MechanismConfig sieve;
  sieve.kind = MechanismKind::kSieve;
  sieve.beta = 0.7;
  MechanismConfig combined;
  combined.kind = MechanismKind::kSieveBoundedOverload;
  combined.beta = 0.4;
  combined.c = 2.0;
  for (int t = 0; t < 30; ++t) {
    const auto inst = sample_instance(DistributionSpec::exponential(1), 5, 3, rng);
    for (int i = 0; i < 3; ++i) {
      EXPECT_TRUE(ic_audit(sieve, inst, i).violations.empty());
      EXPECT_TRUE(ic_audit(combined, inst, i).violations.empty());
    }
  }
}

TEST(AuditTest, CatchesAMisbehavingPaymentRule) {
  // Paying first-price (own reported work) is not truthful; the audit must
  // find the overreport.
  const auto inst = Instance::from_rows({{1, 3}, {2, 4}});
  const auto grid = default_misreports(inst, 0);
  const Outcome truthful = run_minimum_work(inst);
  double best_gain = 0.0;
  for (const auto& report : grid) {
    const auto lied = inst.with_column(0, report.column);
    const auto o = run_minimum_work(lied);
    double paid = 0.0;
    double work = 0.0;
    for (int j = 0; j < 2; ++j) {
      if (o.schedule.assignment[j] == 0) {
        paid += lied.runtime(j, 0);
        work += inst.runtime(j, 0);
      }
    }
    best_gain = std::max(best_gain, paid - work);
  }
  EXPECT_GT(best_gain, kAuditTolerance);
  EXPECT_GT(truthful.require_payments()[0], 0.0);
}

}  // namespace
}  // namespace pisched

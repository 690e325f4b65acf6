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

// The standard verification suite: a fixed list of lemma checks, each run on
// its own stream derive_seed(seed, 3, index) and reported as a JSON record.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "pisched/diagnostics.hpp"
#include "pisched/distribution.hpp"
#include "pisched/lemmas.hpp"
#include "pisched/random.hpp"

namespace pisched {

struct SuiteCheck {
  std::string id;
  std::function<nlohmann::json(Rng&)> run;
};

// `trials` sets the sample size of the sampling checks; a few heavier checks
// use a fixed fraction of it.
inline std::vector<SuiteCheck> lemma_suite(std::size_t trials = 100000) {
  using nlohmann::json;
  const auto expo = DistributionSpec::exponential(1.0);
  const auto two_point = DistributionSpec::two_point(1.0, 10.0, 0.5);
  const auto unif = DistributionSpec::uniform(0.0, 1.0);
  std::vector<SuiteCheck> suite;

  for (const auto& spec : {expo, two_point}) {
    for (int m : {8, 16}) {
      for (int i : {1, 2, 3}) {
        suite.push_back({"order-stat-dominance", [=](Rng& rng) {
                           const auto r = check_order_stat_dominance(spec, m, i,
                                                                     trials, rng);
                           return lemma_record(
                               "order-stat-dominance",
                               {{"dist", spec.to_string()}, {"m", m}, {"i", i}},
                               trials, statistics_json(r), r.band, r.pass);
                         }});
      }
    }
  }

  suite.push_back({"mhr-scaling", [=](Rng& rng) {
                     const auto r = check_mhr_scaling(expo, 3, trials, rng);
                     // Equality case: the tails must also agree within bands.
                     const bool equal = r.max_abs_gap <= 2 * r.band;
                     auto stats = statistics_json(r);
                     stats["equal-within-bands"] = equal;
                     return lemma_record("mhr-scaling",
                                         {{"dist", expo.to_string()}, {"r", 3}},
                                         trials, stats, r.band, r.pass && equal);
                   }});
  for (int r_copies : {1, 2}) {
    suite.push_back({"mhr-scaling", [=](Rng& rng) {
                       const auto r = check_mhr_scaling(unif, r_copies, trials, rng);
                       return lemma_record(
                           "mhr-scaling",
                           {{"dist", unif.to_string()}, {"r", r_copies}}, trials,
                           statistics_json(r), r.band, r.pass);
                     }});
  }

  struct CopiesCase {
    CopiesQuery q;
    std::string label;
  };
  const std::vector<CopiesCase> copies = {
      {{IntegerLaw::constant(2), expo, 2.0, 1}, "K=2 n=1 exp(1)"},
      {{IntegerLaw::constant(2), DistributionSpec::two_point(3.0, 4.0, 0.0),
        2.0, 3},
       "K=c=2 constant w=3"},
      {{IntegerLaw::uniform(2, 3), unif, 2.0, 4}, "K~U{2,3} n=4 uniform(0,1)"},
  };
  for (const auto& cc : copies) {
    suite.push_back({"random-copies", [=](Rng& rng) {
                       const auto r = check_random_copies(cc.q, trials, rng);
                       return lemma_record(
                           "random-copies",
                           {{"case", cc.label}, {"c", cc.q.c}, {"n", cc.q.n}},
                           trials, statistics_json(r), 0.0, r.pass);
                     }});
  }

  suite.push_back({"correlation-gap", [](Rng&) {
                     const auto r = check_correlation_gap(
                         JointLaw::single_winner(5), GapMode::kExact);
                     return lemma_record("correlation-gap",
                                         {{"joint", "single-winner"}, {"n", 5},
                                          {"mode", "exact"}},
                                         0, statistics_json(r), 0.0, r.pass);
                   }});
  suite.push_back({"correlation-gap", [=](Rng& rng) {
                     const auto r = check_correlation_gap(
                         JointLaw::single_winner(5), GapMode::kMonteCarlo,
                         trials, &rng);
                     return lemma_record("correlation-gap",
                                         {{"joint", "single-winner"}, {"n", 5},
                                          {"mode", "monte-carlo"}},
                                         trials, statistics_json(r), 0.0, r.pass);
                   }});
  suite.push_back({"correlation-gap", [](Rng&) {
                     const auto r = check_correlation_gap(
                         JointLaw::comonotone_bernoulli(2, 0.5), GapMode::kExact);
                     return lemma_record("correlation-gap",
                                         {{"joint", "comonotone-bernoulli"},
                                          {"n", 2}, {"mode", "exact"}},
                                         0, statistics_json(r), 0.0, r.pass);
                   }});
  suite.push_back({"correlation-gap", [](Rng&) {
                     const auto r = check_correlation_gap(
                         JointLaw::product({{{0.0, 0.5}, {1.0, 0.5}},
                                            {{0.0, 0.25}, {2.0, 0.75}},
                                            {{1.0, 0.5}, {3.0, 0.5}}}),
                         GapMode::kExact);
                     return lemma_record("correlation-gap",
                                         {{"joint", "independent"}, {"n", 3},
                                          {"mode", "exact"}},
                                         0, statistics_json(r), 0.0, r.pass);
                   }});

  const std::size_t bound_trials = std::max<std::size_t>(trials / 10, 100);
  suite.push_back({"opt-ratio-mhr", [=](Rng& rng) {
                     const auto r =
                         check_opt_ratio_mhr(expo, 16, 16, 0.5, bound_trials, rng);
                     return lemma_record("opt-ratio-mhr",
                                         {{"dist", expo.to_string()}, {"n", 16},
                                          {"m", 16}, {"delta", 0.5}},
                                         bound_trials, statistics_json(r), 0.0,
                                         r.pass);
                   }});
  suite.push_back({"opt-ratio-mhr", [=](Rng& rng) {
                     const auto r =
                         check_opt_ratio_mhr(unif, 8, 8, 0.5, bound_trials, rng);
                     return lemma_record("opt-ratio-mhr",
                                         {{"dist", unif.to_string()}, {"n", 8},
                                          {"m", 8}, {"delta", 0.5}},
                                         bound_trials, statistics_json(r), 0.0,
                                         r.pass);
                   }});

  for (const auto& [spec, k] :
       std::vector<std::pair<DistributionSpec, int>>{
           {DistributionSpec::exponential(2.0), 4},
           {unif, 3},
           {DistributionSpec::pareto(2.5, 1.0), 2},
           {expo, 1}}) {
    suite.push_back({"min-hazard", [spec, k](Rng&) {
                       const auto r = check_min_hazard_identity(spec, k);
                       return lemma_record("min-hazard",
                                           {{"dist", spec.to_string()}, {"k", k}},
                                           0, statistics_json(r), 0.0, r.pass);
                     }});
  }

  const std::size_t sieve_trials = std::max<std::size_t>(trials / 10, 100);
  for (const auto& spec : {expo, DistributionSpec::pareto(2.5, 1.0)}) {
    suite.push_back({"sieve-unscheduled", [=](Rng& rng) {
                       const auto r = check_sieve_unscheduled(spec, 100, 10, 2.0,
                                                              sieve_trials, rng);
                       return lemma_record("sieve-unscheduled",
                                           {{"dist", spec.to_string()},
                                            {"n", 100}, {"m", 10}, {"k", 2}},
                                           sieve_trials, statistics_json(r), 0.0,
                                           r.pass);
                     }});
  }

  suite.push_back({"negative-control", [=](Rng& rng) {
                     const auto r = check_falsified_dominance(expo, 16, trials, rng);
                     auto stats = statistics_json(r);
                     stats["claim-rejected"] = !r.pass;
                     return lemma_record("negative-control",
                                         {{"dist", expo.to_string()}, {"m", 16}},
                                         trials, stats, r.band, !r.pass);
                   }});

  suite.push_back({"last-entry-rank", [=](Rng& rng) {
                     const auto r = check_rank_dominance(expo, 64, 64, 7.0,
                                                         bound_trials, rng);
                     return lemma_record(
                         "last-entry-rank",
                         {{"dist", expo.to_string()}, {"n", 64}, {"m", 64},
                          {"c", 7}},
                         bound_trials,
                         {{"last-entry-cdf", r.last_entry_cdf},
                          {"envelope-cdf", r.envelope_cdf},
                          {"max-violation", r.max_violation},
                          {"max-rank-seen", r.max_rank_seen},
                          {"rank-cap", r.rank_cap}},
                         r.band, r.pass);
                   }});
  suite.push_back({"geometric-rank-pmf", [=](Rng& rng) {
                     const auto r = check_geometric_frequencies(7.0, 64, trials, rng);
                     return lemma_record("geometric-rank-pmf",
                                         {{"c", 7}, {"m", 64}}, trials,
                                         {{"pmf", r.pmf},
                                          {"frequency", r.frequency},
                                          {"z", r.z},
                                          {"max-abs-z", r.max_abs_z}},
                                         0.0, r.pass);
                   }});
  return suite;
}

inline std::vector<std::string> suite_ids(const std::vector<SuiteCheck>& suite) {
  std::vector<std::string> ids;
  for (const auto& c : suite) {
    if (std::find(ids.begin(), ids.end(), c.id) == ids.end()) ids.push_back(c.id);
  }
  return ids;
}

// Runs the checks whose id matches `lemma` ("all" runs every check). Results
// come back in suite order whatever the thread count.
inline std::vector<nlohmann::json> run_suite(const std::vector<SuiteCheck>& suite,
                                             const std::string& lemma,
                                             std::uint64_t seed,
                                             int threads = 0) {
  std::vector<std::size_t> picked;
  for (std::size_t c = 0; c < suite.size(); ++c) {
    if (lemma == "all" || suite[c].id == lemma) picked.push_back(c);
  }
  if (picked.empty()) throw InvalidArgument("unknown lemma id '" + lemma + "'");
  std::vector<nlohmann::json> out(picked.size());
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, picked.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t p = next++; p < picked.size(); p = next++) {
      try {
        Rng rng(derive_seed(seed, 3, picked[p]));
        out[p] = suite[picked[p]].run(rng);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace pisched

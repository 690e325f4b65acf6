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

// Structural diagnostics of bounded overload: the last-entry rank, its
// geometric envelope, and the runtime comparison against last entry.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pisched/distribution.hpp"
#include "pisched/error.hpp"
#include "pisched/instance.hpp"
#include "pisched/mechanism.hpp"
#include "pisched/random.hpp"
#include "pisched/stats.hpp"

namespace pisched {

struct RankDominanceReport {
  int rank_cap = 0;
  std::vector<double> last_entry_cdf;  // Pr[L <= r], r = 1..rank_cap
  std::vector<double> envelope_cdf;    // Pr[R <= r] from sampled ranks
  double band = 0.0;
  double max_violation = 0.0;  // max of envelope - last_entry - 2 band
  int max_rank_seen = 0;
  bool pass = false;
  std::size_t probes = 0;
};

// Each probe draws a fresh n x m instance and a uniformly chosen job, and
// records its last-entry rank; an equal number of envelope ranks is sampled.
// L is dominated by the envelope when its CDF lies above at every rank.
inline RankDominanceReport check_rank_dominance(const DistributionSpec& spec,
                                                int n, int m, double c,
                                                std::size_t probes, Rng& rng) {
  detail::require(probes >= 2, "rank dominance: need at least two probes");
  const int top = rank_cap(c, m);
  std::vector<double> last(static_cast<std::size_t>(top) + 1, 0.0);
  std::vector<double> envelope(static_cast<std::size_t>(top) + 1, 0.0);
  RankDominanceReport r;
  r.rank_cap = top;
  r.probes = probes;
  for (std::size_t p = 0; p < probes; ++p) {
    const Instance inst = sample_instance(spec, n, m, rng);
    const int j = static_cast<int>(uniform_index(rng, n));
    const int rank = last_entry_rank(inst, c, j);
    r.max_rank_seen = std::max(r.max_rank_seen, rank);
    last[std::min(rank, top)] += 1.0;
    envelope[sample_geometric_rank(c, m, rng)] += 1.0;
  }
  r.band = dkw_half_width(probes);
  r.max_violation = -1.0;
  double cum_last = 0.0;
  double cum_env = 0.0;
  for (int k = 1; k <= top; ++k) {
    cum_last += last[k] / probes;
    cum_env += envelope[k] / probes;
    r.last_entry_cdf.push_back(cum_last);
    r.envelope_cdf.push_back(cum_env);
    r.max_violation = std::max(r.max_violation, cum_env - cum_last - 2 * r.band);
  }
  r.pass = r.max_violation <= 0.0 && r.max_rank_seen <= top;
  return r;
}

struct FrequencyReport {
  std::vector<double> pmf;
  std::vector<double> frequency;
  std::vector<double> z;  // (frequency - pmf) / binomial standard error
  double max_abs_z = 0.0;
  bool pass = false;
  std::size_t draws = 0;
};

inline FrequencyReport check_geometric_frequencies(double c, int m,
                                                   std::size_t draws, Rng& rng) {
  detail::require(draws >= 1, "geometric frequencies: draws must be >= 1");
  FrequencyReport r;
  r.pmf = geometric_rank_pmf(c, m);
  r.draws = draws;
  std::vector<double> counts(r.pmf.size(), 0.0);
  for (std::size_t d = 0; d < draws; ++d) {
    counts[sample_geometric_rank(c, m, rng) - 1] += 1.0;
  }
  for (std::size_t i = 0; i < r.pmf.size(); ++i) {
    const double f = counts[i] / draws;
    const double se = std::sqrt(r.pmf[i] * (1 - r.pmf[i]) / draws);
    const double z = se > 0 ? (f - r.pmf[i]) / se : (f == r.pmf[i] ? 0 : 1e9);
    r.frequency.push_back(f);
    r.z.push_back(z);
    r.max_abs_z = std::max(r.max_abs_z, std::abs(z));
  }
  r.pass = r.max_abs_z <= kSigmaSlack;
  return r;
}

struct LastEntryComparison {
  int jobs = 0;
  int rank_violations = 0;     // L_j > ceil(m / c)
  int runtime_violations = 0;  // runtime under the mechanism > last entry's
};

// Every job of one instance: its bounded-overload runtime against the
// runtime last entry would give it.
inline LastEntryComparison compare_with_last_entry(const Instance& inst,
                                                   double c) {
  const auto outcome = run_bounded_overload(inst, c, Payments::kSkip);
  const int top = rank_cap(c, inst.m());
  LastEntryComparison cmp;
  for (int j = 0; j < inst.n(); ++j) {
    const auto probe = last_entry(inst, c, j);
    ++cmp.jobs;
    if (probe.rank > top) ++cmp.rank_violations;
    const double actual = inst.runtime(j, outcome.schedule.assignment[j]);
    if (actual > probe.runtime + kWorkTolerance) ++cmp.runtime_violations;
  }
  return cmp;
}

}  // namespace pisched

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

// Statistical checks of order-statistic and expected-maximum inequalities.
//
// Dominance claims "X is stochastically dominated by Y" are tested as
// Pr[X > t] <= Pr[Y > t] on a grid, each empirical tail carrying a two-sided
// DKW band at 99%; a grid point violates when the gap exceeds both bands.
// Moment claims pass within three combined standard errors. The inequalities
// are theorems, so a failure points at a bug, not at bad luck.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pisched/bounds.hpp"
#include "pisched/distribution.hpp"
#include "pisched/error.hpp"
#include "pisched/instance.hpp"
#include "pisched/mechanism.hpp"
#include "pisched/order_stats.hpp"
#include "pisched/random.hpp"
#include "pisched/stats.hpp"

namespace pisched {

inline constexpr int kGridPoints = 64;
inline constexpr int kMaxDominanceRank = 6;
inline constexpr double kMaxDominanceDraws = 5e9;

struct DominanceReport {
  std::vector<double> grid;
  std::vector<double> lhs_tail;
  std::vector<double> rhs_tail;
  double band = 0.0;            // DKW half-width of each tail
  double max_violation = 0.0;   // max of lhs - rhs - 2 band
  double max_abs_gap = 0.0;     // max |lhs - rhs|
  double boundary_gap = 0.0;    // lhs - rhs at the first grid point
  bool pass = false;
  std::size_t trials = 0;
  std::string note;
};

using Sampler = std::function<double(Rng&)>;

// Tests "lhs is dominated by rhs" for t >= grid_lo. The grid spans
// [grid_lo, pooled 99.9th percentile] and starts at grid_lo itself.
inline DominanceReport check_dominance(const Sampler& lhs, const Sampler& rhs,
                                       double grid_lo, std::size_t trials,
                                       Rng& rng) {
  detail::require(trials >= 2, "dominance: need at least two trials");
  std::vector<double> a(trials);
  std::vector<double> b(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    a[t] = lhs(rng);
    b[t] = rhs(rng);
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> pooled;
  pooled.reserve(2 * trials);
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(pooled));
  double hi = sample_quantile(pooled, 0.999);
  if (!(hi > grid_lo)) hi = grid_lo + std::max(1.0, std::abs(grid_lo));

  DominanceReport r;
  r.trials = trials;
  r.band = dkw_half_width(trials);
  r.max_violation = -std::numeric_limits<double>::infinity();
  for (int g = 0; g < kGridPoints; ++g) {
    const double t = grid_lo + (hi - grid_lo) * g / (kGridPoints - 1);
    const double lt = tail_above(a, t);
    const double rt = tail_above(b, t);
    r.grid.push_back(t);
    r.lhs_tail.push_back(lt);
    r.rhs_tail.push_back(rt);
    r.max_violation = std::max(r.max_violation, lt - rt - 2.0 * r.band);
    r.max_abs_gap = std::max(r.max_abs_gap, std::abs(lt - rt));
  }
  r.boundary_gap = r.lhs_tail.front() - r.rhs_tail.front();
  r.pass = r.max_violation <= 0.0;
  return r;
}

// The i-th smallest of m draws against max(alpha, max of 4^i copies of the
// minimum of m/2 draws), for t >= alpha = sup{z : F(z) < 1/m}. Odd m uses
// floor(m/2) and says so in the note.
inline DominanceReport check_order_stat_dominance(const DistributionSpec& spec,
                                                  int m, int i,
                                                  std::size_t trials, Rng& rng) {
  detail::require(m >= 2 && i >= 1 && i <= m,
                  "order-stat dominance: need m >= 2 and 1 <= i <= m");
  if (i > kMaxDominanceRank) {
    throw TooLargeError("order-stat dominance: 4^i copies; i capped at " +
                        std::to_string(kMaxDominanceRank));
  }
  const int half = m / 2;
  const int copies = 1 << (2 * i);
  const double draws_per_copy = spec.continuous() ? 1.0 : half;
  if (copies * draws_per_copy * static_cast<double>(trials) >
      kMaxDominanceDraws) {
    throw TooLargeError("order-stat dominance: draw budget exceeded");
  }
  const double alpha = alpha_quantile(spec, m);
  auto lhs = [&spec, i, m](Rng& g) { return sample_order_stat({spec, i, m}, g); };
  auto rhs = [&spec, half, copies, alpha](Rng& g) {
    double worst = alpha;
    for (int c = 0; c < copies; ++c) {
      worst = std::max(worst, sample_min(spec, half, g));
    }
    return worst;
  };
  auto r = check_dominance(lhs, rhs, alpha, trials, rng);
  if (m % 2 != 0) r.note = "odd m: halves use floor(m/2)";
  return r;
}

// X against r times the minimum of r draws; MHR families only.
inline DominanceReport check_mhr_scaling(const DistributionSpec& spec, int r,
                                         std::size_t trials, Rng& rng) {
  detail::require(r >= 1, "mhr scaling: r must be >= 1");
  if (!spec.mhr()) {
    throw InvalidArgument("mhr scaling: " + spec.to_string() +
                          " does not have a monotone hazard rate");
  }
  auto lhs = [&spec](Rng& g) { return spec.sample(g); };
  auto rhs = [&spec, r](Rng& g) { return r * sample_min(spec, r, g); };
  return check_dominance(lhs, rhs, 0.0, trials, rng);
}

// A false claim used as a negative control: the minimum of m/2
// draws dominated by the minimum of m draws. A sound checker rejects it.
inline DominanceReport check_falsified_dominance(const DistributionSpec& spec,
                                                 int m, std::size_t trials,
                                                 Rng& rng) {
  detail::require(m >= 2, "falsified dominance: m must be >= 2");
  auto lhs = [&spec, m](Rng& g) { return sample_min(spec, m / 2, g); };
  auto rhs = [&spec, m](Rng& g) { return sample_min(spec, m, g); };
  return check_dominance(lhs, rhs, 0.0, trials, rng);
}

// ---------------------------------------------------------------------------
// Random number of copies.

// A law on integers given by (value, probability) pairs.
struct IntegerLaw {
  std::vector<std::pair<int, double>> pmf;

  static IntegerLaw constant(int v) { return {{{v, 1.0}}}; }
  static IntegerLaw uniform(int lo, int hi) {
    IntegerLaw law;
    for (int v = lo; v <= hi; ++v) {
      law.pmf.emplace_back(v, 1.0 / (hi - lo + 1));
    }
    return law;
  }

  double mean() const {
    double s = 0.0;
    for (const auto& [v, p] : pmf) s += v * p;
    return s;
  }
  int min_value() const {
    int lo = pmf.front().first;
    for (const auto& [v, p] : pmf) lo = std::min(lo, v);
    return lo;
  }
  int sample(Rng& rng) const {
    const double u = uniform01(rng);
    double cum = 0.0;
    for (const auto& [v, p] : pmf) {
      cum += p;
      if (u < cum) return v;
    }
    return pmf.back().first;
  }
};

struct CopiesQuery {
  IntegerLaw copies;      // K_j, i.i.d., support >= c
  DistributionSpec value; // W_j
  double c = 2.0;
  int n = 1;

  void validate() const {
    detail::require(c > 1, "copies: c must be > 1");
    detail::require(n >= 1, "copies: n must be >= 1");
    detail::require(!copies.pmf.empty(), "copies: empty copy-count law");
    detail::require(copies.min_value() >= c,
                    "copies: copy counts must be >= c");
  }
};

struct MomentComparison {
  double lhs = 0.0;
  double lhs_se = 0.0;
  double rhs = 0.0;
  double rhs_se = 0.0;
  double ratio = 0.0;  // lhs / rhs
  bool pass = false;
  std::size_t trials = 0;
};

// E[max_j max of K_j copies of W_j] <= c/(c-1) E[K] E[max_j W_j].
inline MomentComparison check_random_copies(const CopiesQuery& q,
                                            std::size_t trials, Rng& rng) {
  q.validate();
  detail::require(trials >= 2, "copies: need at least two trials");
  RunningStats lhs;
  RunningStats max_w;
  for (std::size_t t = 0; t < trials; ++t) {
    double worst = 0.0;
    for (int j = 0; j < q.n; ++j) {
      const int k = q.copies.sample(rng);
      for (int c = 0; c < k; ++c) worst = std::max(worst, q.value.sample(rng));
    }
    lhs.add(worst);
  }
  for (std::size_t t = 0; t < trials; ++t) {
    double worst = 0.0;
    for (int j = 0; j < q.n; ++j) worst = std::max(worst, q.value.sample(rng));
    max_w.add(worst);
  }
  const double factor = q.c / (q.c - 1.0) * q.copies.mean();
  MomentComparison r;
  r.trials = trials;
  r.lhs = lhs.mean();
  r.lhs_se = lhs.std_error();
  r.rhs = factor * max_w.mean();
  r.rhs_se = factor * max_w.std_error();
  r.ratio = r.rhs > 0 ? r.lhs / r.rhs : 0.0;
  r.pass = r.lhs - r.rhs <=
           kSigmaSlack * std::sqrt(r.lhs_se * r.lhs_se + r.rhs_se * r.rhs_se);
  return r;
}

// ---------------------------------------------------------------------------
// Correlation gap.

// A finite joint law of (X_1..X_n): outcome vectors with probabilities.
struct JointLaw {
  std::vector<std::vector<double>> outcomes;
  std::vector<double> probs;

  int dims() const {
    return outcomes.empty() ? 0 : static_cast<int>(outcomes.front().size());
  }

  void validate() const {
    detail::require(!outcomes.empty() && outcomes.size() == probs.size(),
                    "joint law: outcomes and probabilities disagree");
    double total = 0.0;
    for (std::size_t o = 0; o < outcomes.size(); ++o) {
      detail::require(static_cast<int>(outcomes[o].size()) == dims(),
                      "joint law: ragged outcome vectors");
      detail::require(probs[o] >= 0, "joint law: negative probability");
      total += probs[o];
    }
    detail::require(std::abs(total - 1.0) < 1e-9,
                    "joint law: probabilities must sum to one");
  }

  std::size_t sample_index(Rng& rng) const {
    const double u = uniform01(rng);
    double cum = 0.0;
    for (std::size_t o = 0; o < probs.size(); ++o) {
      cum += probs[o];
      if (u < cum) return o;
    }
    return probs.size() - 1;
  }

  // Exactly one of n coordinates, chosen uniformly, equals one.
  static JointLaw single_winner(int n) {
    JointLaw law;
    for (int j = 0; j < n; ++j) {
      std::vector<double> x(static_cast<std::size_t>(n), 0.0);
      x[j] = 1.0;
      law.outcomes.push_back(std::move(x));
      law.probs.push_back(1.0 / n);
    }
    return law;
  }

  // n identical copies of one Bernoulli(p).
  static JointLaw comonotone_bernoulli(int n, double p) {
    JointLaw law;
    law.outcomes.push_back(std::vector<double>(static_cast<std::size_t>(n), 0.0));
    law.probs.push_back(1.0 - p);
    law.outcomes.push_back(std::vector<double>(static_cast<std::size_t>(n), 1.0));
    law.probs.push_back(p);
    return law;
  }

  // Independent coordinates given by per-coordinate atom lists.
  static JointLaw product(const std::vector<std::vector<Atom>>& marginals) {
    JointLaw law;
    law.outcomes.push_back({});
    law.probs.push_back(1.0);
    for (const auto& atoms : marginals) {
      JointLaw next;
      for (std::size_t o = 0; o < law.outcomes.size(); ++o) {
        for (const auto& [v, p] : atoms) {
          auto x = law.outcomes[o];
          x.push_back(v);
          next.outcomes.push_back(std::move(x));
          next.probs.push_back(law.probs[o] * p);
        }
      }
      law = std::move(next);
    }
    return law;
  }
};

enum class GapMode { kExact, kMonteCarlo };

struct GapReport {
  double correlated_max = 0.0;    // E[max X]
  double independent_max = 0.0;   // E[max Y]
  double ratio = 0.0;
  double ratio_se = 0.0;          // zero in exact mode
  double bound = std::numbers::e / (std::numbers::e - 1.0);
  bool pass = false;
  std::size_t trials = 0;
};

inline constexpr int kMaxExactGapDims = 10;

// E[max X] under the joint law against E[max Y] under the product of its
// marginals.
inline GapReport check_correlation_gap(const JointLaw& joint, GapMode mode,
                                       std::size_t trials = 0,
                                       Rng* rng = nullptr) {
  joint.validate();
  const int n = joint.dims();
  GapReport r;
  if (mode == GapMode::kExact) {
    detail::require(n <= kMaxExactGapDims,
                    "correlation gap: exact mode needs n <= 10");
    for (std::size_t o = 0; o < joint.outcomes.size(); ++o) {
      const auto& x = joint.outcomes[o];
      r.correlated_max += joint.probs[o] * *std::max_element(x.begin(), x.end());
    }
    // Marginal CDFs on the union of support points.
    std::vector<std::map<double, double>> marginal(static_cast<std::size_t>(n));
    std::vector<double> support;
    for (std::size_t o = 0; o < joint.outcomes.size(); ++o) {
      for (int j = 0; j < n; ++j) {
        marginal[j][joint.outcomes[o][j]] += joint.probs[o];
        support.push_back(joint.outcomes[o][j]);
      }
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    double previous = 0.0;  // Pr[max Y <= previous support point]
    for (double v : support) {
      double joint_cdf = 1.0;
      for (int j = 0; j < n; ++j) {
        double fj = 0.0;
        for (const auto& [x, p] : marginal[j]) {
          if (x <= v) fj += p;
        }
        joint_cdf *= std::min(fj, 1.0);
      }
      r.independent_max += v * (joint_cdf - previous);
      previous = joint_cdf;
    }
    r.ratio = r.correlated_max / r.independent_max;
    r.pass = r.ratio <= r.bound + 1e-12;
    return r;
  }

  detail::require(rng != nullptr && trials >= 2,
                  "correlation gap: Monte Carlo mode needs a stream and trials");
  RunningStats x_max;
  RunningStats y_max;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& x = joint.outcomes[joint.sample_index(*rng)];
    x_max.add(*std::max_element(x.begin(), x.end()));
    // Coordinate j of an independent draw of the joint has the j-th marginal.
    double y = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      y = std::max(y, joint.outcomes[joint.sample_index(*rng)][j]);
    }
    y_max.add(y);
  }
  r.trials = trials;
  r.correlated_max = x_max.mean();
  r.independent_max = y_max.mean();
  r.ratio = r.correlated_max / r.independent_max;
  r.ratio_se = ratio_std_error(r.correlated_max, x_max.std_error(),
                               r.independent_max, y_max.std_error());
  r.pass = r.ratio <= r.bound + kSigmaSlack * r.ratio_se;
  return r;
}

// ---------------------------------------------------------------------------
// Reduced-machine bounds for MHR families.

struct OptRatioReport {
  double worst_ratio = 0.0;
  double worst_ratio_se = 0.0;
  double average_ratio = 0.0;
  double average_ratio_se = 0.0;
  double bound = 0.0;  // 1 / delta^2
  int reduced_machines = 0;
  bool pass = false;
  std::size_t trials = 0;
};

// Both lower bounds on round(delta m) machines over the same bounds on m.
inline OptRatioReport check_opt_ratio_mhr(const DistributionSpec& spec, int n,
                                          int m, double delta,
                                          std::size_t trials, Rng& rng) {
  if (!spec.mhr()) {
    throw InvalidArgument("opt ratio: " + spec.to_string() +
                          " does not have a monotone hazard rate");
  }
  const std::vector<DistributionSpec> specs(static_cast<std::size_t>(n), spec);
  const auto reduced = opt_reference_detail(specs, m, delta, trials, rng);
  const auto full = opt_reference_detail(specs, m, 1.0, trials, rng);
  OptRatioReport r;
  r.trials = trials;
  r.bound = 1.0 / (delta * delta);
  r.reduced_machines = reduced.worst_best.machines_used;
  r.worst_ratio = reduced.worst_best.mean / full.worst_best.mean;
  r.worst_ratio_se =
      ratio_std_error(reduced.worst_best.mean, reduced.worst_best.std_error,
                      full.worst_best.mean, full.worst_best.std_error);
  r.average_ratio = reduced.average_best.mean / full.average_best.mean;
  r.average_ratio_se =
      ratio_std_error(reduced.average_best.mean, reduced.average_best.std_error,
                      full.average_best.mean, full.average_best.std_error);
  r.pass = r.worst_ratio <= r.bound + kSigmaSlack * r.worst_ratio_se &&
           r.average_ratio <= r.bound + kSigmaSlack * r.average_ratio_se;
  return r;
}

// ---------------------------------------------------------------------------
// Hazard rate of the k-fold minimum.

struct HazardReport {
  std::vector<double> grid;
  double max_rel_error = 0.0;
  bool pass = false;
};

inline constexpr double kHazardTolerance = 1e-10;

// Evaluation points strictly inside the support.
inline std::vector<double> default_hazard_grid(const DistributionSpec& spec) {
  double lo = 0.0;
  double hi = 0.0;
  switch (spec.family()) {
    case Family::kExponential: {
      const double rate = std::get<Exponential>(spec.params()).rate;
      lo = 0.01 / rate;
      hi = 5.0 / rate;
      break;
    }
    case Family::kUniform: {
      const auto& u = std::get<Uniform>(spec.params());
      lo = u.lo + 0.01 * (u.hi - u.lo);
      hi = u.lo + 0.95 * (u.hi - u.lo);
      break;
    }
    case Family::kPareto: {
      const double scale = std::get<Pareto>(spec.params()).scale;
      lo = 1.01 * scale;
      hi = 10.0 * scale;
      break;
    }
    default:
      throw InvalidArgument("hazard grid: " + spec.to_string() +
                            " has no closed-form hazard rate");
  }
  std::vector<double> grid;
  for (int g = 0; g < kGridPoints; ++g) {
    grid.push_back(lo + (hi - lo) * g / (kGridPoints - 1));
  }
  return grid;
}

// The hazard implied by the k-fold minimum's law equals k h(t).
inline HazardReport check_min_hazard_identity(const DistributionSpec& spec,
                                              int k,
                                              std::vector<double> grid = {}) {
  if (!spec.has_closed_form_hazard()) {
    throw InvalidArgument("hazard identity: " + spec.to_string() +
                          " has no closed-form hazard rate");
  }
  detail::require(k >= 1, "hazard identity: k must be >= 1");
  if (grid.empty()) grid = default_hazard_grid(spec);
  HazardReport r;
  r.grid = grid;
  for (double t : grid) {
    const double tail = min_of_k_survival(spec, k, t);
    if (!(tail > 0)) continue;
    const double implied = min_of_k_density(spec, k, t) / tail;
    const double expected = k * spec.hazard(t);
    const double err = expected == 0.0 ? std::abs(implied)
                                       : std::abs(implied - expected) /
                                             std::abs(expected);
    r.max_rel_error = std::max(r.max_rel_error, err);
  }
  r.pass = r.max_rel_error <= kHazardTolerance;
  return r;
}

// ---------------------------------------------------------------------------
// Jobs the sieve leaves unscheduled.

struct SieveCountReport {
  double beta = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double bound = 0.0;     // k m
  double expected = 0.0;  // n Pr[min of m > beta], exact
  bool pass = false;
  std::size_t trials = 0;
  std::string warning;
};

inline SieveCountReport check_sieve_unscheduled(const DistributionSpec& spec,
                                                int n, int m, double k,
                                                std::size_t trials, Rng& rng) {
  detail::require(trials >= 2, "sieve count: need at least two trials");
  const auto tuning = derive_reserve(spec, n, m, 0.5, ReserveTuning::kLemma6, k,
                                     &rng);
  SieveCountReport r;
  r.beta = tuning.beta;
  r.warning = tuning.warning;
  r.bound = k * m;
  r.expected = n * std::pow(spec.survival(r.beta), m);
  RunningStats acc;
  for (std::size_t t = 0; t < trials; ++t) {
    const Instance inst = sample_instance(spec, n, m, rng);
    acc.add(run_sieve(inst, r.beta, Payments::kSkip).schedule.unscheduled());
  }
  r.trials = trials;
  r.mean = acc.mean();
  r.std_error = acc.std_error();
  r.pass = r.mean <= r.bound + kSigmaSlack * r.std_error;
  return r;
}

// ---------------------------------------------------------------------------
// JSON records: {lemma-id, parameters, trials, statistics, band, pass}.

inline nlohmann::json lemma_record(const std::string& id,
                                   nlohmann::json parameters,
                                   std::size_t trials,
                                   nlohmann::json statistics, double band,
                                   bool pass) {
  return {{"lemma-id", id},       {"parameters", std::move(parameters)},
          {"trials", trials},     {"statistics", std::move(statistics)},
          {"band", band},         {"pass", pass}};
}

inline nlohmann::json statistics_json(const DominanceReport& r) {
  return {{"grid", r.grid},
          {"lhs-tail", r.lhs_tail},
          {"rhs-tail", r.rhs_tail},
          {"max-violation", r.max_violation},
          {"max-abs-gap", r.max_abs_gap},
          {"boundary-gap", r.boundary_gap},
          {"note", r.note}};
}

inline nlohmann::json statistics_json(const MomentComparison& r) {
  return {{"lhs", r.lhs},
          {"lhs-se", r.lhs_se},
          {"rhs", r.rhs},
          {"rhs-se", r.rhs_se},
          {"ratio", r.ratio}};
}

inline nlohmann::json statistics_json(const GapReport& r) {
  return {{"correlated-max", r.correlated_max},
          {"independent-max", r.independent_max},
          {"ratio", r.ratio},
          {"ratio-se", r.ratio_se},
          {"bound", r.bound}};
}

inline nlohmann::json statistics_json(const OptRatioReport& r) {
  return {{"worst-best-ratio", r.worst_ratio},
          {"worst-best-ratio-se", r.worst_ratio_se},
          {"average-best-ratio", r.average_ratio},
          {"average-best-ratio-se", r.average_ratio_se},
          {"bound", r.bound},
          {"reduced-machines", r.reduced_machines}};
}

inline nlohmann::json statistics_json(const HazardReport& r) {
  return {{"grid", r.grid}, {"max-rel-error", r.max_rel_error}};
}

inline nlohmann::json statistics_json(const SieveCountReport& r) {
  return {{"beta", r.beta},       {"mean-unscheduled", r.mean},
          {"std-error", r.std_error}, {"bound", r.bound},
          {"expected", r.expected},   {"warning", r.warning}};
}

}  // namespace pisched

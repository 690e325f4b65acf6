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

// Order statistics of i.i.d. job-size draws: samplers, the k-fold minimum
// law, the expected minimum (the reserve statistic) and the 1/m quantile.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "pisched/distribution.hpp"
#include "pisched/error.hpp"
#include "pisched/random.hpp"
#include "pisched/stats.hpp"

namespace pisched {

inline constexpr std::size_t kDefaultMinBudget = 100'000;

// The i-th smallest of k i.i.d. draws from spec (1-based).
struct OrderStatQuery {
  DistributionSpec spec;
  int i = 1;
  int k = 1;

  void validate() const {
    detail::require(k >= 1 && i >= 1 && i <= k,
                    "order statistic needs 1 <= i <= k");
  }
};

inline double sample_order_stat(const OrderStatQuery& q, Rng& rng) {
  q.validate();
  if (q.i == 1 && q.spec.continuous()) {
    // Inverse-CDF shortcut: the minimum of k draws has survival S^k.
    const double u = uniform01(rng);
    const double p = -std::expm1(std::log1p(-u) / q.k);
    return q.spec.quantile(p);
  }
  if (q.i == 1) {
    double best = q.spec.sample(rng);
    for (int d = 1; d < q.k; ++d) best = std::min(best, q.spec.sample(rng));
    return best;
  }
  std::vector<double> draws(static_cast<std::size_t>(q.k));
  for (auto& d : draws) d = q.spec.sample(rng);
  std::nth_element(draws.begin(), draws.begin() + (q.i - 1), draws.end());
  return draws[static_cast<std::size_t>(q.i - 1)];
}

// Convenience for the minimum of k draws.
inline double sample_min(const DistributionSpec& spec, int k, Rng& rng) {
  return sample_order_stat({spec, 1, k}, rng);
}

// Pr[min of k draws <= t] = 1 - (1 - F(t))^k.
inline double min_of_k_cdf(const DistributionSpec& spec, int k, double t) {
  detail::require(k >= 1, "min_of_k_cdf: k must be >= 1");
  return 1.0 - std::pow(spec.survival(t), k);
}

// Pr[min of k draws > t] = (1 - F(t))^k, exact in the far tail where
// 1 - min_of_k_cdf cancels.
inline double min_of_k_survival(const DistributionSpec& spec, int k, double t) {
  detail::require(k >= 1, "min_of_k_survival: k must be >= 1");
  return std::pow(spec.survival(t), k);
}

// Density of the k-fold minimum of a continuous family.
inline double min_of_k_density(const DistributionSpec& spec, int k, double t) {
  detail::require(k >= 1, "min_of_k_density: k must be >= 1");
  return k * std::pow(spec.survival(t), k - 1) * spec.density(t);
}

// E[min of k draws]. `exact` marks closed-form results (std_error == 0).
struct MinEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;
};

// Closed forms for exponential, uniform and two-point; Monte Carlo with
// `budget` draws of the minimum otherwise. Throws when a Monte Carlo estimate
// is needed but no stream or no budget is supplied.
inline MinEstimate expected_min(const DistributionSpec& spec, int k,
                                Rng* rng = nullptr,
                                std::size_t budget = kDefaultMinBudget) {
  detail::require(k >= 1, "expected_min: k must be >= 1");
  switch (spec.family()) {
    case Family::kExponential:
      return {1.0 / (k * std::get<Exponential>(spec.params()).rate), 0.0, true};
    case Family::kUniform: {
      const auto& u = std::get<Uniform>(spec.params());
      return {u.lo + (u.hi - u.lo) / (k + 1.0), 0.0, true};
    }
    case Family::kTwoPoint: {
      // The minimum is `high` only when every draw is.
      const auto& p = std::get<TwoPoint>(spec.params());
      return {p.low + (p.high - p.low) * std::pow(p.p_high, k), 0.0, true};
    }
    default:
      break;
  }
  if (rng == nullptr || budget == 0) {
    throw InvalidArgument("expected_min: " + spec.to_string() +
                          " has no closed form and the Monte Carlo budget is "
                          "zero");
  }
  RunningStats acc;
  for (std::size_t t = 0; t < budget; ++t) acc.add(sample_min(spec, k, *rng));
  return {acc.mean(), acc.std_error(), false};
}

// alpha = sup{z : F(z) < 1/m}. For continuous families this is the 1/m
// quantile; for step CDFs it is the first atom at which F reaches 1/m.
inline double alpha_quantile(const DistributionSpec& spec, int m) {
  detail::require(m >= 1, "alpha_quantile: m must be >= 1");
  const double level = 1.0 / m;
  if (spec.continuous()) {
    if (m == 1) {
      // sup of {F < 1} is the right end of the support.
      if (spec.family() == Family::kUniform) {
        return std::get<Uniform>(spec.params()).hi;
      }
      return std::numeric_limits<double>::infinity();
    }
    return spec.quantile(level);
  }
  const auto atoms = spec.atoms();
  double cum = 0.0;
  for (const auto& [value, mass] : atoms) {
    cum += mass;
    // Relative slack so 1/m hit exactly by summed masses is not missed.
    if (cum >= level * (1.0 - 1e-12)) return value;
  }
  return atoms.back().first;
}

}  // namespace pisched

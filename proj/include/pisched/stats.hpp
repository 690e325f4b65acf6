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
#include <span>
#include <vector>

namespace pisched {

// Confidence level used by every statistical check in the library.
inline constexpr double kConfidence = 0.99;
// Slack, in standard errors, for moment comparisons.
inline constexpr double kSigmaSlack = 3.0;

// Welford accumulator for mean and variance.
class RunningStats {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  // Chan et al. parallel merge.
  void merge(const RunningStats& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double n1 = static_cast<double>(count_);
    const double n2 = static_cast<double>(other.count_);
    const double delta = other.mean_ - mean_;
    const double total = n1 + n2;
    mean_ += delta * n2 / total;
    m2_ += other.m2_ + delta * delta * n1 * n2 / total;
    count_ += other.count_;
  }

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double std_error() const {
    return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_))
                      : 0.0;
  }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Two-sided Dvoretzky-Kiefer-Wolfowitz half-width for an empirical CDF built
// from `samples` draws at the given confidence.
inline double dkw_half_width(std::size_t samples,
                             double confidence = kConfidence) {
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) /
                   (2.0 * static_cast<double>(samples)));
}

// Delta-method standard error of a/b. `cov` is the covariance of the two
// estimators (zero when they are independent).
inline double ratio_std_error(double a, double se_a, double b, double se_b,
                              double cov = 0.0) {
  if (b == 0.0) return std::nan("");
  const double r = a / b;
  double rel = 0.0;
  if (a != 0.0) rel += (se_a / a) * (se_a / a);
  rel += (se_b / b) * (se_b / b);
  if (a != 0.0) rel -= 2.0 * cov / (a * b);
  return std::abs(r) * std::sqrt(std::max(rel, 0.0));
}

// Empirical upper-tail probability Pr[X > t] from an ascending sample.
inline double tail_above(std::span<const double> sorted, double t) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
  return static_cast<double>(sorted.end() - it) /
         static_cast<double>(sorted.size());
}

// Empirical CDF Pr[X <= t] from an ascending sample.
inline double cdf_at(std::span<const double> sorted, double t) {
  return 1.0 - tail_above(sorted, t);
}

// Type-7 sample quantile of an ascending sample.
inline double sample_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) return std::nan("");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace pisched

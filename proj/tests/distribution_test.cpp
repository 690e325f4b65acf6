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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "pisched/distribution.hpp"
#include "pisched/error.hpp"
#include "pisched/lemmas.hpp"
#include "pisched/order_stats.hpp"
#include "pisched/random.hpp"
#include "pisched/stats.hpp"

namespace pisched {
namespace {

std::vector<DistributionSpec> all_families() {
  return {DistributionSpec::exponential(1.5), DistributionSpec::uniform(0.5, 2.0),
          DistributionSpec::pareto(2.5, 1.0),
          DistributionSpec::two_point(1.0, 10.0, 0.5),
          DistributionSpec::empirical({0.5, 1.0, 1.0, 4.0})};
}

TEST(RandomTest, DeriveSeedIsStableAndSpreads) {
  EXPECT_EQ(derive_seed(7, 0, 3), derive_seed(7, 0, 3));
  EXPECT_NE(derive_seed(7, 0, 3), derive_seed(7, 0, 4));
  EXPECT_NE(derive_seed(7, 0, 3), derive_seed(7, 1, 3));
  EXPECT_NE(derive_seed(7, 0, 3), derive_seed(8, 0, 3));
  static_assert(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
}

TEST(RandomTest, Uniform01StaysInUnitInterval) {
  Rng rng(1);
  for (int t = 0; t < 100000; ++t) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomTest, UniformIndexCoversRange) {
  Rng rng(2);
  std::vector<int> seen(5, 0);
  for (int t = 0; t < 5000; ++t) ++seen[uniform_index(rng, 5)];
  for (int c : seen) EXPECT_GT(c, 800);
}

TEST(StatsTest, RunningStatsMatchesTwoPassFormulas) {
  const std::vector<double> xs = {1.0, 4.0, 2.5, 7.0, 3.5, 0.25};
  RunningStats s;
  for (double x : xs) s.add(x);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  EXPECT_DOUBLE_EQ(s.mean(), mean);
  EXPECT_NEAR(s.variance(), ss / (xs.size() - 1), 1e-12);
  EXPECT_NEAR(s.std_error(), std::sqrt(ss / (xs.size() - 1) / xs.size()), 1e-12);

  RunningStats a;
  RunningStats b;
  for (std::size_t i = 0; i < xs.size(); ++i) (i < 2 ? a : b).add(xs[i]);
  a.merge(b);
  EXPECT_NEAR(a.mean(), s.mean(), 1e-12);
  EXPECT_NEAR(a.variance(), s.variance(), 1e-12);
}

TEST(StatsTest, DkwHalfWidth) {
  EXPECT_NEAR(dkw_half_width(100000), std::sqrt(std::log(200.0) / 200000.0),
              1e-15);
}

TEST(StatsTest, RatioStdErrorDeltaMethod) {
  // r = a/b; (se_r / r)^2 = (se_a/a)^2 + (se_b/b)^2 for independent a, b.
  EXPECT_NEAR(ratio_std_error(2.0, 0.2, 4.0, 0.2), 0.5 * std::sqrt(0.01 + 0.0025),
              1e-15);
}

TEST(SampleTest, DegenerateTwoPointAlwaysLow) {
  const auto spec = DistributionSpec::two_point(1.0, 10.0, 0.0);
  Rng rng(3);
  for (int t = 0; t < 1000; ++t) ASSERT_EQ(spec.sample(rng), 1.0);
}

TEST(SampleTest, ExponentialMeanWithinOnePercent) {
  const auto spec = DistributionSpec::exponential(1.0);
  Rng rng(4);
  RunningStats s;
  for (int t = 0; t < 1000000; ++t) s.add(sample(spec, rng));
  EXPECT_NEAR(s.mean(), 1.0, 0.01);
}

TEST(SampleTest, UniformSupport) {
  const auto spec = DistributionSpec::uniform(0.0, 1.0);
  Rng rng(5);
  for (int t = 0; t < 100000; ++t) {
    const double x = spec.sample(rng);
    ASSERT_GE(x, 0.0);
    ASSERT_LE(x, 1.0);
  }
}

TEST(SampleTest, DrawsAreNonnegative) {
  Rng rng(6);
  for (const auto& spec : all_families()) {
    for (int t = 0; t < 10000; ++t) ASSERT_GE(spec.sample(rng), 0.0);
  }
}

TEST(SampleTest, SameStreamSameDraws) {
  for (const auto& spec : all_families()) {
    Rng a(9);
    Rng b(9);
    for (int t = 0; t < 100; ++t) ASSERT_EQ(spec.sample(a), spec.sample(b));
  }
}

TEST(OrderStatTest, MinOfFourExponentialsHasMeanQuarter) {
  Rng rng(7);
  RunningStats s;
  const OrderStatQuery q{DistributionSpec::exponential(1.0), 1, 4};
  for (int t = 0; t < 1000000; ++t) s.add(sample_order_stat(q, rng));
  EXPECT_NEAR(s.mean(), 0.25, 0.0025);
}

TEST(OrderStatTest, SecondOfThreeUniformsIsBetaTwoTwo) {
  Rng rng(8);
  RunningStats s;
  const OrderStatQuery q{DistributionSpec::uniform(0.0, 1.0), 2, 3};
  for (int t = 0; t < 1000000; ++t) s.add(sample_order_stat(q, rng));
  EXPECT_NEAR(s.mean(), 0.5, 0.005);
  // Beta(2,2) variance 1/20.
  EXPECT_NEAR(s.variance(), 0.05, 0.001);
}

TEST(OrderStatTest, SingleDrawMatchesSample) {
  // i = k = 1 against plain sampling, as a two-sample dominance both ways.
  for (const auto& spec : all_families()) {
    Rng rng(10);
    auto direct = [&](Rng& g) { return spec.sample(g); };
    auto via_query = [&](Rng& g) { return sample_order_stat({spec, 1, 1}, g); };
    const auto ab = check_dominance(direct, via_query, 0.0, 20000, rng);
    const auto ba = check_dominance(via_query, direct, 0.0, 20000, rng);
    EXPECT_TRUE(ab.pass) << spec.to_string();
    EXPECT_TRUE(ba.pass) << spec.to_string();
  }
}

TEST(OrderStatTest, QueryValidation) {
  EXPECT_THROW(OrderStatQuery({DistributionSpec::exponential(1), 3, 2}).validate(),
               InvalidArgument);
  EXPECT_THROW(OrderStatQuery({DistributionSpec::exponential(1), 0, 2}).validate(),
               InvalidArgument);
}

TEST(ExpectedMinTest, ClosedForms) {
  EXPECT_DOUBLE_EQ(expected_min(DistributionSpec::exponential(1.0), 10).value, 0.1);
  EXPECT_DOUBLE_EQ(expected_min(DistributionSpec::uniform(0.0, 1.0), 3).value, 0.25);
  const auto tp = expected_min(DistributionSpec::two_point(1.0, 10.0, 0.5), 2);
  EXPECT_DOUBLE_EQ(tp.value, 3.25);
  EXPECT_TRUE(tp.exact);
}

TEST(ExpectedMinTest, TwoPointMatchesEnumeration) {
  // All 2^k outcomes of k draws, weighted.
  const double p = 0.3;
  const int k = 4;
  double oracle = 0.0;
  for (int mask = 0; mask < (1 << k); ++mask) {
    double prob = 1.0;
    double lo = 10.0;
    for (int d = 0; d < k; ++d) {
      const bool high = mask & (1 << d);
      prob *= high ? p : 1 - p;
      lo = std::min(lo, high ? 10.0 : 2.0);
    }
    oracle += prob * lo;
  }
  EXPECT_NEAR(expected_min(DistributionSpec::two_point(2.0, 10.0, p), k).value,
              oracle, 1e-12);
}

TEST(ExpectedMinTest, MonteCarloNeedsBudget) {
  const auto spec = DistributionSpec::pareto(2.5, 1.0);
  EXPECT_THROW(expected_min(spec, 2), InvalidArgument);
  Rng rng(11);
  EXPECT_THROW(expected_min(spec, 2, &rng, 0), InvalidArgument);
}

TEST(ExpectedMinTest, ParetoMonteCarloMatchesClosedForm) {
  // The minimum of k Pareto(a, s) draws is Pareto(k a, s), mean s k a/(k a - 1).
  Rng rng(12);
  const auto est = expected_min(DistributionSpec::pareto(2.5, 1.0), 2, &rng);
  EXPECT_FALSE(est.exact);
  EXPECT_GT(est.std_error, 0.0);
  EXPECT_NEAR(est.value, 5.0 / 4.0, 3 * est.std_error);
}

TEST(AlphaQuantileTest, Examples) {
  EXPECT_NEAR(alpha_quantile(DistributionSpec::exponential(1.0), 10),
              -std::log(0.9), 1e-12);
  EXPECT_NEAR(alpha_quantile(DistributionSpec::exponential(1.0), 10), 0.10536,
              1e-5);
  EXPECT_NEAR(alpha_quantile(DistributionSpec::uniform(0.0, 1.0), 4), 0.25, 1e-12);
  EXPECT_EQ(alpha_quantile(DistributionSpec::two_point(1.0, 10.0, 0.5), 4), 1.0);
}

TEST(AlphaQuantileTest, StepCdfBracketsLevel) {
  for (const auto& spec : {DistributionSpec::two_point(1.0, 10.0, 0.5),
                           DistributionSpec::two_point(1.0, 10.0, 0.95),
                           DistributionSpec::empirical({0.5, 1.0, 1.0, 4.0})}) {
    for (int m : {1, 2, 3, 4, 8, 16, 50}) {
      const double z = alpha_quantile(spec, m);
      EXPECT_LT(spec.cdf(std::nextafter(z, -1.0)), 1.0 / m) << spec.to_string();
      EXPECT_GE(spec.cdf(z), 1.0 / m - 1e-12) << spec.to_string();
    }
  }
}

TEST(AlphaQuantileTest, ContinuousHitsLevel) {
  for (const auto& spec : {DistributionSpec::exponential(1.5),
                           DistributionSpec::uniform(0.5, 2.0),
                           DistributionSpec::pareto(2.5, 1.0)}) {
    for (int m : {2, 3, 10, 64}) {
      EXPECT_NEAR(spec.cdf(alpha_quantile(spec, m)), 1.0 / m, 1e-10);
    }
  }
}

TEST(MinOfKCdfTest, Examples) {
  const auto e = DistributionSpec::exponential(1.0);
  EXPECT_NEAR(min_of_k_cdf(e, 3, 1.0), 1 - std::exp(-3.0), 1e-15);
  EXPECT_NEAR(min_of_k_cdf(e, 3, 1.0), 0.95021, 1e-5);
  EXPECT_NEAR(min_of_k_cdf(DistributionSpec::uniform(0, 1), 2, 0.5), 0.75, 1e-15);
  for (const auto& spec : all_families()) {
    for (double t : {0.0, 0.7, 1.0, 2.5, 12.0}) {
      EXPECT_NEAR(min_of_k_cdf(spec, 1, t), spec.cdf(t), 1e-15);
    }
  }
}

TEST(MinOfKCdfTest, MatchesSampledMinimumWithinDkwBand) {
  Rng rng(13);
  const std::size_t n = 100000;
  const double band = dkw_half_width(n);
  for (const auto& spec : all_families()) {
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample_min(spec, 3, rng);
    std::sort(xs.begin(), xs.end());
    for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) {
      const double t = sample_quantile(xs, q);
      EXPECT_LE(std::abs(cdf_at(xs, t) - min_of_k_cdf(spec, 3, t)), band)
          << spec.to_string() << " at " << t;
    }
  }
}

TEST(CdfTest, ValidAndMonotone) {
  for (const auto& spec : all_families()) {
    double last = 0.0;
    for (double t = 0.0; t <= 20.0; t += 0.05) {
      const double f = spec.cdf(t);
      ASSERT_GE(f, 0.0);
      ASSERT_LE(f, 1.0);
      ASSERT_GE(f, last - 1e-15) << spec.to_string() << " at " << t;
      last = f;
    }
  }
}

TEST(CdfTest, QuantileInvertsContinuousCdf) {
  for (const auto& spec : {DistributionSpec::exponential(1.5),
                           DistributionSpec::uniform(0.5, 2.0),
                           DistributionSpec::pareto(2.5, 1.0)}) {
    for (double p : {0.01, 0.3, 0.5, 0.9, 0.999}) {
      EXPECT_NEAR(spec.cdf(spec.quantile(p)), p, 1e-12);
    }
  }
}

TEST(HazardTest, UniformMinOfThreeAtHalf) {
  // h(t) = 1/(1 - t) = 2 at t = 0.5, so the 3-fold minimum has hazard 6.
  const auto u = DistributionSpec::uniform(0.0, 1.0);
  EXPECT_NEAR(u.hazard(0.5), 2.0, 1e-15);
  const double implied =
      min_of_k_density(u, 3, 0.5) / min_of_k_survival(u, 3, 0.5);
  EXPECT_NEAR(implied, 6.0, 1e-12);
}

TEST(MhrTest, Flags) {
  EXPECT_TRUE(DistributionSpec::exponential(2).mhr());
  EXPECT_TRUE(DistributionSpec::uniform(0, 1).mhr());
  EXPECT_FALSE(DistributionSpec::pareto(2, 1).mhr());
  EXPECT_FALSE(DistributionSpec::two_point(1, 10, 0.5).mhr());
  EXPECT_TRUE(DistributionSpec::two_point(1, 10, 0.0).mhr());
  EXPECT_TRUE(DistributionSpec::empirical({3, 3, 3}).mhr());
  EXPECT_FALSE(DistributionSpec::empirical({1, 3}).mhr());
}

TEST(MhrTest, UniformHazardIsNondecreasing) {
  const auto u = DistributionSpec::uniform(0.5, 2.0);
  double last = 0.0;
  for (double t = 0.5; t < 1.99; t += 0.01) {
    ASSERT_GE(u.hazard(t), last);
    last = u.hazard(t);
  }
}

TEST(ValidationTest, RejectsBadParameters) {
  EXPECT_THROW(DistributionSpec::exponential(0), InvalidArgument);
  EXPECT_THROW(DistributionSpec::exponential(-1), InvalidArgument);
  EXPECT_THROW(DistributionSpec::uniform(1, 1), InvalidArgument);
  EXPECT_THROW(DistributionSpec::uniform(-1, 1), InvalidArgument);
  EXPECT_THROW(DistributionSpec::pareto(0, 1), InvalidArgument);
  EXPECT_THROW(DistributionSpec::pareto(1, 0), InvalidArgument);
  EXPECT_THROW(DistributionSpec::two_point(10, 1, 0.5), InvalidArgument);
  EXPECT_THROW(DistributionSpec::two_point(1, 10, 1.5), InvalidArgument);
  EXPECT_THROW(DistributionSpec::empirical({}), InvalidArgument);
  EXPECT_THROW(DistributionSpec::empirical({1.0, -2.0}), InvalidArgument);
}

TEST(ParseTest, RoundTripsCompactStrings) {
  for (const std::string text :
       {"exp:1", "exp:0.25", "uniform:0,1", "pareto:2.5,1", "twopoint:1,10,0.5"}) {
    const auto spec = DistributionSpec::parse(text);
    EXPECT_EQ(spec.to_string(), text);
    EXPECT_EQ(DistributionSpec::parse(spec.to_string()), spec);
  }
  EXPECT_EQ(DistributionSpec::parse("exp:2"), DistributionSpec::exponential(2));
  EXPECT_EQ(DistributionSpec::parse("twopoint:1,10,0.5"),
            DistributionSpec::two_point(1, 10, 0.5));
}

TEST(ParseTest, RejectsMalformed) {
  for (const std::string text :
       {"", "exp", "exp:", "exp:x", "exp:1,2", "uniform:1", "normal:0,1",
        "twopoint:1,10", "pareto:1,2,3", "exp:-1"}) {
    EXPECT_THROW(DistributionSpec::parse(text), InvalidArgument) << text;
  }
}

TEST(ParseTest, EmpiricalFromFile) {
  const std::string path = ::testing::TempDir() + "pisched_samples.txt";
  {
    std::ofstream out(path);
    out << "3.5\n1\n\n2.25\n";
  }
  const auto spec = DistributionSpec::parse("empirical:" + path);
  EXPECT_EQ(spec.family(), Family::kEmpirical);
  const auto atoms = spec.atoms();
  ASSERT_EQ(atoms.size(), 3u);
  EXPECT_EQ(atoms.front().first, 1.0);
  EXPECT_NEAR(spec.cdf(2.25), 2.0 / 3.0, 1e-15);
  EXPECT_THROW(DistributionSpec::parse("empirical:/nonexistent/file"),
               InvalidArgument);
  std::remove(path.c_str());
}

}  // namespace
}  // namespace pisched

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

// Job-size distribution families.
//
// A DistributionSpec is an immutable value describing the law of one job's
// runtime on a single machine. Families with a continuous, strictly increasing
// CDF (exponential, uniform, pareto) expose an inverse CDF; the step-CDF
// families (two-point, empirical) expose their atoms instead.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pisched/error.hpp"
#include "pisched/random.hpp"

namespace pisched {

enum class Family { kExponential, kUniform, kPareto, kTwoPoint, kEmpirical };

struct Exponential {
  double rate;
};
struct Uniform {
  double lo;
  double hi;
};
struct Pareto {
  double shape;
  double scale;
};
struct TwoPoint {
  double low;
  double high;
  double p_high;
};
struct Empirical {
  std::shared_ptr<const std::vector<double>> sorted;  // ascending, nonempty
  std::string source;
};

using Atom = std::pair<double, double>;  // (value, probability)

class DistributionSpec {
 public:
  using Params = std::variant<Exponential, Uniform, Pareto, TwoPoint, Empirical>;

  static DistributionSpec exponential(double rate) {
    detail::require(rate > 0 && std::isfinite(rate), "exp: rate must be > 0");
    return DistributionSpec(Exponential{rate});
  }

  static DistributionSpec uniform(double lo, double hi) {
    detail::require(lo >= 0 && hi > lo && std::isfinite(hi),
                    "uniform: need 0 <= lo < hi");
    return DistributionSpec(Uniform{lo, hi});
  }

  static DistributionSpec pareto(double shape, double scale) {
    detail::require(shape > 0 && scale > 0 && std::isfinite(shape) &&
                        std::isfinite(scale),
                    "pareto: shape and scale must be > 0");
    return DistributionSpec(Pareto{shape, scale});
  }

  // p_high may sit on either endpoint of [0, 1], giving a point mass.
  static DistributionSpec two_point(double low, double high, double p_high) {
    detail::require(low >= 0 && high > low && std::isfinite(high),
                    "twopoint: need 0 <= low < high");
    detail::require(p_high >= 0 && p_high <= 1,
                    "twopoint: high probability must lie in [0, 1]");
    return DistributionSpec(TwoPoint{low, high, p_high});
  }

  static DistributionSpec empirical(std::vector<double> values,
                                    std::string source = "<inline>") {
    detail::require(!values.empty(), "empirical: sample list is empty");
    for (double v : values) {
      detail::require(v >= 0 && std::isfinite(v),
                      "empirical: values must be finite and nonnegative");
    }
    std::sort(values.begin(), values.end());
    return DistributionSpec(Empirical{
        std::make_shared<const std::vector<double>>(std::move(values)),
        std::move(source)});
  }

  // Parses `exp:RATE`, `uniform:LO,HI`, `pareto:SHAPE,SCALE`,
  // `twopoint:LOW,HIGH,PHI` or `empirical:PATH`.
  static DistributionSpec parse(std::string_view text);

  Family family() const { return static_cast<Family>(params_.index()); }
  const Params& params() const { return params_; }

  // True for continuous CDFs that are strictly increasing on their support.
  bool continuous() const {
    return family() == Family::kExponential || family() == Family::kUniform ||
           family() == Family::kPareto;
  }

  // Nondecreasing hazard rate. A step CDF only qualifies when it is a single
  // atom: log-survival of a nondegenerate step function is not concave.
  bool mhr() const {
    switch (family()) {
      case Family::kExponential:
      case Family::kUniform:
        return true;
      case Family::kPareto:
        return false;
      case Family::kTwoPoint: {
        const auto& p = std::get<TwoPoint>(params_);
        return p.p_high == 0.0 || p.p_high == 1.0;
      }
      case Family::kEmpirical: {
        const auto& v = *std::get<Empirical>(params_).sorted;
        return v.front() == v.back();
      }
    }
    return false;
  }

  bool has_closed_form_hazard() const { return continuous(); }

  double cdf(double t) const { return 1.0 - survival(t); }

  // Pr[X > t].
  double survival(double t) const {
    return std::visit(
        [t](const auto& p) -> double {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, Exponential>) {
            return t <= 0 ? 1.0 : std::exp(-p.rate * t);
          } else if constexpr (std::is_same_v<P, Uniform>) {
            if (t < p.lo) return 1.0;
            if (t >= p.hi) return 0.0;
            return (p.hi - t) / (p.hi - p.lo);
          } else if constexpr (std::is_same_v<P, Pareto>) {
            return t <= p.scale ? 1.0 : std::pow(p.scale / t, p.shape);
          } else if constexpr (std::is_same_v<P, TwoPoint>) {
            if (t < p.low) return 1.0;
            if (t < p.high) return p.p_high;
            return 0.0;
          } else {
            const auto& v = *p.sorted;
            const auto above =
                v.end() - std::upper_bound(v.begin(), v.end(), t);
            return static_cast<double>(above) / static_cast<double>(v.size());
          }
        },
        params_);
  }

  // Density of a continuous family; throws for step CDFs.
  double density(double t) const {
    switch (family()) {
      case Family::kExponential: {
        const double r = std::get<Exponential>(params_).rate;
        return t < 0 ? 0.0 : r * std::exp(-r * t);
      }
      case Family::kUniform: {
        const auto& p = std::get<Uniform>(params_);
        return (t < p.lo || t >= p.hi) ? 0.0 : 1.0 / (p.hi - p.lo);
      }
      case Family::kPareto: {
        const auto& p = std::get<Pareto>(params_);
        return t < p.scale ? 0.0
                           : p.shape * std::pow(p.scale, p.shape) /
                                 std::pow(t, p.shape + 1);
      }
      default:
        throw InvalidArgument("density: " + to_string() + " has no density");
    }
  }

  // Closed-form hazard rate f/(1-F).
  double hazard(double t) const {
    switch (family()) {
      case Family::kExponential:
        return t < 0 ? 0.0 : std::get<Exponential>(params_).rate;
      case Family::kUniform: {
        const auto& p = std::get<Uniform>(params_);
        if (t < p.lo) return 0.0;
        if (t >= p.hi) return std::numeric_limits<double>::infinity();
        return 1.0 / (p.hi - t);
      }
      case Family::kPareto: {
        const auto& p = std::get<Pareto>(params_);
        return t < p.scale ? 0.0 : p.shape / t;
      }
      default:
        throw InvalidArgument("hazard: " + to_string() +
                              " has no closed-form hazard rate");
    }
  }

  // Inverse CDF for continuous families, p in [0, 1].
  double quantile(double p) const {
    detail::require(p >= 0 && p <= 1, "quantile: p outside [0, 1]");
    switch (family()) {
      case Family::kExponential:
        return -std::log1p(-p) / std::get<Exponential>(params_).rate;
      case Family::kUniform: {
        const auto& u = std::get<Uniform>(params_);
        return u.lo + p * (u.hi - u.lo);
      }
      case Family::kPareto: {
        const auto& q = std::get<Pareto>(params_);
        return q.scale * std::pow(1.0 - p, -1.0 / q.shape);
      }
      default:
        throw InvalidArgument("quantile: " + to_string() +
                              " has a step CDF; use atoms()");
    }
  }

  // Support points with their masses, ascending. Step CDFs only.
  std::vector<Atom> atoms() const {
    std::vector<Atom> out;
    if (family() == Family::kTwoPoint) {
      const auto& p = std::get<TwoPoint>(params_);
      if (p.p_high < 1.0) out.emplace_back(p.low, 1.0 - p.p_high);
      if (p.p_high > 0.0) out.emplace_back(p.high, p.p_high);
    } else if (family() == Family::kEmpirical) {
      const auto& v = *std::get<Empirical>(params_).sorted;
      const double w = 1.0 / static_cast<double>(v.size());
      for (double x : v) {
        if (!out.empty() && out.back().first == x) {
          out.back().second += w;
        } else {
          out.emplace_back(x, w);
        }
      }
    } else {
      throw InvalidArgument("atoms: " + to_string() + " is continuous");
    }
    return out;
  }

  double sample(Rng& rng) const {
    return std::visit(
        [&rng](const auto& p) -> double {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, Exponential>) {
            return -std::log1p(-uniform01(rng)) / p.rate;
          } else if constexpr (std::is_same_v<P, Uniform>) {
            return p.lo + uniform01(rng) * (p.hi - p.lo);
          } else if constexpr (std::is_same_v<P, Pareto>) {
            return p.scale * std::pow(1.0 - uniform01(rng), -1.0 / p.shape);
          } else if constexpr (std::is_same_v<P, TwoPoint>) {
            return uniform01(rng) < p.p_high ? p.high : p.low;
          } else {
            const auto& v = *p.sorted;
            return v[uniform_index(rng, v.size())];
          }
        },
        params_);
  }

  // Canonical compact string; parse(to_string()) reproduces the spec.
  std::string to_string() const;

  friend bool operator==(const DistributionSpec& a, const DistributionSpec& b) {

    if (a.family() != b.family()) return false;
    if (a.family() == Family::kEmpirical) {
      return *std::get<Empirical>(a.params_).sorted ==
             *std::get<Empirical>(b.params_).sorted;
    }
    return a.to_string() == b.to_string();
  }

 private:
  explicit DistributionSpec(Params p) : params_(std::move(p)) {}

  Params params_;
};

// One i.i.d. draw.
inline double sample(const DistributionSpec& spec, Rng& rng) {
  return spec.sample(rng);
}

namespace detail {

// Shortest round-tripping decimal form.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidArgument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<double> parse_number_list(std::string_view s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(parse_double(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::vector<double> read_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("empirical: cannot open '" + path + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    values.push_back(parse_double(line));
  }
  return values;
}

}  // namespace detail

inline std::string DistributionSpec::to_string() const {
  using detail::format_double;
  return std::visit(
      [](const auto& p) -> std::string {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Exponential>) {
          return "exp:" + format_double(p.rate);
        } else if constexpr (std::is_same_v<P, Uniform>) {
          return "uniform:" + format_double(p.lo) + "," + format_double(p.hi);
        } else if constexpr (std::is_same_v<P, Pareto>) {
          return "pareto:" + format_double(p.shape) + "," +
                 format_double(p.scale);
        } else if constexpr (std::is_same_v<P, TwoPoint>) {
          return "twopoint:" + format_double(p.low) + "," +
                 format_double(p.high) + "," + format_double(p.p_high);
        } else {
          return "empirical:" + p.source;
        }
      },
      params_);
}

inline DistributionSpec DistributionSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("distribution spec needs FAMILY:PARAMS, got '" +
                          std::string(text) + "'");
  }
  const std::string_view family = text.substr(0, colon);
  const std::string_view rest = text.substr(colon + 1);
  auto numbers = [&](std::size_t want) {
    auto v = detail::parse_number_list(rest);
    if (v.size() != want) {
      throw InvalidArgument(std::string(family) + ": expected " +
                            std::to_string(want) + " parameters");
    }
    return v;
  };
  if (family == "exp") {
    return exponential(numbers(1)[0]);
  } else if (family == "uniform") {
    const auto v = numbers(2);
    return uniform(v[0], v[1]);
  } else if (family == "pareto") {
    const auto v = numbers(2);
    return pareto(v[0], v[1]);
  } else if (family == "twopoint") {
    const auto v = numbers(3);
    return two_point(v[0], v[1], v[2]);
  } else if (family == "empirical") {
    const std::string path(rest);
    return empirical(detail::read_sample_file(path), path);
  }
  throw InvalidArgument("unknown distribution family '" + std::string(family) +
                        "'");
}

}  // namespace pisched

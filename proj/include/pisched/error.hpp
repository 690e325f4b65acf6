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

#include <stdexcept>
#include <string>

namespace pisched {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed parameters, specs or queries.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A capacity-constrained range contains no schedule for the given jobs.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A Clarke pivot (optimum with one machine removed) does not exist.
class PivotInfeasibleError : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration or a Monte Carlo budget guard was exceeded.
class TooLargeError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration is inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

template <typename E = InvalidArgument>
inline void require(bool ok, const std::string& what) {
  if (!ok) throw E(what);
}

}  // namespace detail
}  // namespace pisched

// Copyright 2026 The skedmd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace skedmd {

/// Invalid user input: malformed spec strings, bad configs, violated
/// preconditions. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure at run time (ill-conditioned solve, SDE blow-up).
/// The CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllConditionedError : public NumericalError {
 public:
  IllConditionedError(const std::string& what, double condition_estimate)
      : NumericalError(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace skedmd

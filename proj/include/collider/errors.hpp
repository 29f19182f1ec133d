// Copyright 2026 The Collider Authors
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

#ifndef COLLIDER_ERRORS_HPP_
#define COLLIDER_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace collider {

/// Bad input: precondition on an argument does not hold.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Argument outside the mathematical domain of the function.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A quantity is not defined for the observed data (e.g. entropy of a
/// sample with no collisions).  Callers typically need more samples.
class EstimateUndefinedError : public std::runtime_error {
 public:
  explicit EstimateUndefinedError(const std::string& what) : std::runtime_error(what) {}
};

/// Exact enumeration was requested for a state space too large to enumerate.
class EnumerationError : public ValidationError {
 public:
  explicit EnumerationError(const std::string& what) : ValidationError(what) {}
};

/// Root bracketing failed after the maximum number of expansions.
class BracketError : public std::runtime_error {
 public:
  explicit BracketError(const std::string& what) : std::runtime_error(what) {}
};

/// No envelope constants consistent with the Monte Carlo data.
class CalibrationError : public std::runtime_error {
 public:
  explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace collider

#endif  // COLLIDER_ERRORS_HPP_

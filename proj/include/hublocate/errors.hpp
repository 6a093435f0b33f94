// Copyright 2026 The hublocate Authors
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

namespace hublocate {

// Volumes closer than this (m^3) to a band edge or a container multiple are
// treated as lying on it. Absorbs round-off from splitting volumes by
// fractions without moving a volume into the next tariff step.
inline constexpr double kVolumeTol = 1e-10;

// Relative tolerance for currency comparisons.
inline constexpr double kCostRelTol = 1e-6;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed interchange file: bad JSON, missing section, wrong field type.
class FormatError : public Error {
 public:
  FormatError(std::string location, const std::string& message)
      : Error(location.empty() ? message : location + ": " + message),
        location_(std::move(location)) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

// Instance-level defect with a machine-readable code (e.g. DUPLICATE_NODE).
class InstanceError : public Error {
 public:
  InstanceError(std::string code, const std::string& message)
      : Error(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// A solution that does not structurally fit its instance (index out of
// range, unusable sea relation, fraction outside [0, 1]).
class SolutionError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

// Exhaustive search refused because its size estimate exceeds the budget.
class LimitError : public Error {
 public:
  LimitError(double estimate, const std::string& message)
      : Error(message), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

}  // namespace hublocate

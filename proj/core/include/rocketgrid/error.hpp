// Copyright 2026 The rocketgrid Authors. All Rights Reserved.
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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace rocketgrid {

/// Arguments or data that violate an operation's preconditions.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input that cannot be decoded. Text parsers attach a location: a 1-based
/// line number for `.ts`, a 0-based row index for CSV.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}

  ParseError(const std::string& what, std::size_t location, const std::string& unit = "line")
      : std::runtime_error(unit + " " + std::to_string(location) + ": " + what),
        location_(location) {}

  std::optional<std::size_t> location() const noexcept { return location_; }

 private:
  std::optional<std::size_t> location_;
};

/// A resource limit (grid dimension, memory budget) cannot be satisfied.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rocketgrid

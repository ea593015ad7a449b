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
#include <string>
#include <string_view>

#include "rocketgrid/engine.hpp"
#include "rocketgrid/features.hpp"

namespace rocketgrid::cli {

/// Engine settings shared by transform and bench.
struct RunConfig {
  GridLimits limits;
  Precision precision = Precision::kSingle;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::size_t devices = 1;

  EngineOptions engine_options(bool include_mpv) const;
};

/// Parses a key = value config file. Blank lines and lines starting with '#'
/// are ignored. Keys:
///
///   max_x, max_y, workers_per_cell, memory_budget_bytes   positive integers
///   precision                                             single | double
///   threads                                               non-negative integer
///   devices                                               positive integer
///
/// Starts from `base` so flags parsed earlier are not lost. Throws
/// ParseError with the 1-based line of the first bad entry.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

}  // namespace rocketgrid::cli

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

#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rocketgrid/error.hpp"

namespace rocketgrid::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::size_t parse_count(std::string_view value, std::size_t line, bool allow_zero) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParseError("expected a non-negative integer, got '" + std::string(value) + "'", line);
  }
  if (!allow_zero && out == 0) throw ParseError("value must be positive", line);
  return out;
}

}  // namespace

EngineOptions RunConfig::engine_options(bool include_mpv) const {
  EngineOptions opt;
  opt.limits = limits;
  opt.precision = precision;
  opt.include_mpv = include_mpv;
  opt.threads = threads;
  return opt;
}

RunConfig parse_config(std::string_view text, RunConfig cfg) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "max_x") {
      cfg.limits.max_x = parse_count(value, line_no, false);
    } else if (key == "max_y") {
      cfg.limits.max_y = parse_count(value, line_no, false);
    } else if (key == "workers_per_cell") {
      cfg.limits.workers_per_cell = parse_count(value, line_no, false);
    } else if (key == "memory_budget_bytes") {
      cfg.limits.memory_budget_bytes = parse_count(value, line_no, false);
    } else if (key == "threads") {
      cfg.threads = parse_count(value, line_no, true);
    } else if (key == "devices") {
      cfg.devices = parse_count(value, line_no, false);
    } else if (key == "precision") {
      try {
        cfg.precision = parse_precision(value);
      } catch (const InvalidInput& e) {
        throw ParseError(e.what(), line_no);
      }
    } else {
      throw ParseError("unknown key '" + std::string(key) + "'", line_no);
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), base);
}

}  // namespace rocketgrid::cli

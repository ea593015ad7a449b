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
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace rocketgrid::cli {

/// One timed transform. `varied` names the factor this row belongs to
/// (n_instances, l_series, n_kernels, or none for a single point). Rows that
/// hit a capacity limit keep status "capacity" and carry no timing.
struct BenchRow {
  std::string varied;
  std::size_t n_instances = 0;
  std::size_t l_series = 0;
  std::size_t n_kernels = 0;
  std::string status = "ok";
  double wall_seconds = 0.0;
  std::uint64_t dot_products = 0;
  double dot_products_per_second = 0.0;

  bool ok() const { return status == "ok"; }
  bool operator==(const BenchRow&) const = default;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::optional<double> nominal_watts_a;
  std::optional<double> nominal_watts_b;
  std::optional<double> speedup;
  std::optional<double> per_watt_gain;
};

/// One factor at a time: each list with more than one value is swept while
/// the other two factors sit at their base value. A list with a single value
/// fixes that factor.
struct BenchGrid {
  std::vector<std::size_t> n_instances{50, 100, 200, 400};
  std::vector<std::size_t> l_series{250, 500, 1000, 2000};
  std::vector<std::size_t> n_kernels{250, 500, 1000, 2000};
  std::size_t base_instances = 100;
  std::size_t base_length = 1000;
  std::size_t base_kernels = 1000;
};

struct BenchPoint {
  std::string varied;
  std::size_t n_instances = 0;
  std::size_t l_series = 0;
  std::size_t n_kernels = 0;
};

std::vector<BenchPoint> expand_grid(const BenchGrid& grid);

enum class BenchEngine { kGrid, kReference };

struct BenchSettings {
  RunConfig run;
  BenchEngine engine = BenchEngine::kGrid;
  std::size_t n_channels = 1;
  bool include_mpv = false;
  std::size_t repeats = 3;  // minimum wall time over this many runs
  std::uint64_t seed = 0;
};

/// Times feature generation only; data and kernels are built beforehand.
BenchRow time_point(const BenchPoint& point, const BenchSettings& settings);

BenchReport run_bench(const BenchGrid& grid, const BenchSettings& settings,
                      const std::function<void(const BenchRow&)>& on_row = {});

/// speedup * watts_b / watts_a, where a is the measured device and b the
/// baseline. Throws InvalidInput on non-positive inputs.
double per_watt_gain(double speedup, double watts_a, double watts_b);

/// Lowest baseline/measured wall-time ratio over grid points present and ok
/// in both runs. Throws InvalidInput when no point matches.
double min_speedup(const std::vector<BenchRow>& measured, const std::vector<BenchRow>& baseline);

/// Fills speedup and per_watt_gain when watts are present.
void attach_efficiency(BenchReport& report, std::optional<double> speedup);

/// Wall-time ratio t(v) / t(v / 2) for every swept value v whose half was
/// also swept, ordered by factor and then by v.
struct DoublingRatio {
  std::string varied;
  std::size_t value = 0;
  double ratio = 0.0;
};
std::vector<DoublingRatio> doubling_ratios(const std::vector<BenchRow>& rows);

inline constexpr std::string_view kBenchCsvHeader =
    "varied,n_instances,l_series,n_kernels,status,wall_seconds,dot_products,dot_products_per_second";
inline constexpr std::string_view kBenchSchema = "rocketgrid.bench/1";

std::string bench_csv(const BenchReport& report);
std::string bench_json(const BenchReport& report);
/// varied,value,wall_seconds,dot_products_per_second: one line per ok row,
/// ready for a plotting tool.
std::string plot_data(const BenchReport& report);

/// Reads rows written by bench_csv; ParseError with the 0-based data row on
/// malformed input.
std::vector<BenchRow> parse_bench_csv(std::string_view text);

}  // namespace rocketgrid::cli

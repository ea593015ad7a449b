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

#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "rocketgrid/convolution.hpp"
#include "rocketgrid/data.hpp"
#include "rocketgrid/engine.hpp"
#include "rocketgrid/error.hpp"
#include "rocketgrid/kernelgen.hpp"

namespace rocketgrid::cli {
namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_number(std::string_view field, std::size_t row) {
  T out{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("bad number '" + std::string(field) + "'", row, "row");
  }
  return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::size_t sweep_value(const BenchRow& row) {
  if (row.varied == "n_instances") return row.n_instances;
  if (row.varied == "l_series") return row.l_series;
  return row.n_kernels;
}

std::uint64_t count_dot_products(std::size_t n_instances, const KernelBank& bank) {
  std::uint64_t per_instance = 0;
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const KernelView kv = bank.kernel(k);
    per_instance += output_length(bank.l_series(), kv.length, kv.dilation, kv.padding);
  }
  return per_instance * n_instances;
}

}  // namespace

std::vector<BenchPoint> expand_grid(const BenchGrid& grid) {
  if (grid.n_instances.empty() || grid.l_series.empty() || grid.n_kernels.empty()) {
    throw InvalidInput("every bench factor needs at least one value");
  }
  const std::size_t base_n = grid.n_instances.size() == 1 ? grid.n_instances[0] : grid.base_instances;
  const std::size_t base_l = grid.l_series.size() == 1 ? grid.l_series[0] : grid.base_length;
  const std::size_t base_k = grid.n_kernels.size() == 1 ? grid.n_kernels[0] : grid.base_kernels;

  std::vector<BenchPoint> points;
  if (grid.n_instances.size() > 1) {
    for (const std::size_t n : grid.n_instances) points.push_back({"n_instances", n, base_l, base_k});
  }
  if (grid.l_series.size() > 1) {
    for (const std::size_t l : grid.l_series) points.push_back({"l_series", base_n, l, base_k});
  }
  if (grid.n_kernels.size() > 1) {
    for (const std::size_t k : grid.n_kernels) points.push_back({"n_kernels", base_n, base_l, k});
  }
  if (points.empty()) points.push_back({"none", base_n, base_l, base_k});
  for (const BenchPoint& p : points) {
    if (p.n_instances == 0 || p.l_series == 0 || p.n_kernels == 0) {
      throw InvalidInput("bench grid values must be positive");
    }
  }
  return points;
}

BenchRow time_point(const BenchPoint& point, const BenchSettings& settings) {
  BenchRow row;
  row.varied = point.varied;
  row.n_instances = point.n_instances;
  row.l_series = point.l_series;
  row.n_kernels = point.n_kernels;

  const Dataset data = synth_random(point.n_instances, settings.n_channels, point.l_series, settings.seed);
  GenOptions gen;
  gen.seed = settings.seed + 1;
  gen.include_mpv = settings.include_mpv;
  const KernelBank bank = generate_bank(point.l_series, settings.n_channels, point.n_kernels, gen);
  row.dot_products = count_dot_products(point.n_instances, bank);

  const EngineOptions options = settings.run.engine_options(settings.include_mpv);
  double best = std::numeric_limits<double>::infinity();
  try {
    for (std::size_t r = 0; r < std::max<std::size_t>(settings.repeats, 1); ++r) {
      const auto start = std::chrono::steady_clock::now();
      if (settings.engine == BenchEngine::kReference) {
        (void)transform_reference(data, bank, settings.include_mpv, settings.run.precision);
      } else if (settings.run.devices > 1) {
        (void)transform_sharded(data, bank, settings.run.devices, options);
      } else {
        (void)transform(data, bank, options);
      }
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      best = std::min(best, elapsed.count());
    }
  } catch (const CapacityError&) {
    row.status = "capacity";
    return row;
  }
  // steady_clock can report 0 for trivially small points
  row.wall_seconds = std::max(best, 1e-9);
  row.dot_products_per_second = static_cast<double>(row.dot_products) / row.wall_seconds;
  return row;
}

BenchReport run_bench(const BenchGrid& grid, const BenchSettings& settings,
                      const std::function<void(const BenchRow&)>& on_row) {
  BenchReport report;
  for (const BenchPoint& p : expand_grid(grid)) {
    report.rows.push_back(time_point(p, settings));
    if (on_row) on_row(report.rows.back());
  }
  return report;
}

double per_watt_gain(double speedup, double watts_a, double watts_b) {
  if (!(speedup > 0) || !(watts_a > 0) || !(watts_b > 0)) {
    throw InvalidInput("speedup and nominal watts must be positive");
  }
  return speedup * watts_b / watts_a;
}

double min_speedup(const std::vector<BenchRow>& measured, const std::vector<BenchRow>& baseline) {
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const BenchRow& m : measured) {
    if (!m.ok()) continue;
    for (const BenchRow& b : baseline) {
      if (!b.ok() || b.n_instances != m.n_instances || b.l_series != m.l_series || b.n_kernels != m.n_kernels) {
        continue;
      }
      best = std::min(best, b.wall_seconds / m.wall_seconds);
      any = true;
    }
  }
  if (!any) throw InvalidInput("the two timing files share no completed grid point");
  return best;
}

void attach_efficiency(BenchReport& report, std::optional<double> speedup) {
  report.speedup = speedup;
  report.per_watt_gain.reset();
  if (speedup && report.nominal_watts_a && report.nominal_watts_b) {
    report.per_watt_gain = per_watt_gain(*speedup, *report.nominal_watts_a, *report.nominal_watts_b);
  }
}

std::vector<DoublingRatio> doubling_ratios(const std::vector<BenchRow>& rows) {
  std::map<std::string, std::map<std::size_t, double>> sweeps;
  for (const BenchRow& r : rows) {
    if (r.ok() && r.varied != "none") sweeps[r.varied][sweep_value(r)] = r.wall_seconds;
  }
  std::vector<DoublingRatio> out;
  for (const std::string factor : {"n_instances", "l_series", "n_kernels"}) {
    const auto& times = sweeps[factor];
    for (const auto& [value, seconds] : times) {
      if (value % 2 != 0) continue;
      const auto half = times.find(value / 2);
      if (half != times.end()) out.push_back({factor, value, seconds / half->second});
    }
  }
  return out;
}

std::string bench_csv(const BenchReport& report) {
  std::ostringstream out;
  out << kBenchCsvHeader << '\n';
  for (const BenchRow& r : report.rows) {
    out << r.varied << ',' << r.n_instances << ',' << r.l_series << ',' << r.n_kernels << ',' << r.status << ',';
    if (r.ok()) {
      out << format_double(r.wall_seconds) << ',' << r.dot_products << ',' << format_double(r.dot_products_per_second);
    } else {
      out << ',' << r.dot_products << ',';
    }
    out << '\n';
  }
  return out.str();
}

std::string bench_json(const BenchReport& report) {
  nlohmann::json doc;
  doc["schema"] = kBenchSchema;
  doc["rows"] = nlohmann::json::array();
  for (const BenchRow& r : report.rows) {
    nlohmann::json row{{"varied", r.varied},
                       {"n_instances", r.n_instances},
                       {"l_series", r.l_series},
                       {"n_kernels", r.n_kernels},
                       {"status", r.status},
                       {"dot_products", r.dot_products}};
    row["wall_seconds"] = r.ok() ? nlohmann::json(r.wall_seconds) : nlohmann::json(nullptr);
    row["dot_products_per_second"] = r.ok() ? nlohmann::json(r.dot_products_per_second) : nlohmann::json(nullptr);
    doc["rows"].push_back(std::move(row));
  }
  const auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  doc["nominal_watts_a"] = opt(report.nominal_watts_a);
  doc["nominal_watts_b"] = opt(report.nominal_watts_b);
  doc["speedup"] = opt(report.speedup);
  doc["per_watt_gain"] = opt(report.per_watt_gain);
  return doc.dump(2) + "\n";
}

std::string plot_data(const BenchReport& report) {
  std::ostringstream out;
  out << "varied,value,wall_seconds,dot_products_per_second\n";
  for (const BenchRow& r : report.rows) {
    if (!r.ok()) continue;
    out << r.varied << ',' << sweep_value(r) << ',' << format_double(r.wall_seconds) << ','
        << format_double(r.dot_products_per_second) << '\n';
  }
  return out.str();
}

std::vector<BenchRow> parse_bench_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
  }
  if (lines.empty() || lines.front() != kBenchCsvHeader) {
    throw ParseError("missing bench CSV header '" + std::string(kBenchCsvHeader) + "'");
  }
  std::vector<BenchRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t row_index = i - 1;
    const auto f = split_fields(lines[i]);
    if (f.size() != 8) throw ParseError("expected 8 fields", row_index, "row");
    BenchRow r;
    r.varied = std::string(f[0]);
    r.n_instances = parse_number<std::size_t>(f[1], row_index);
    r.l_series = parse_number<std::size_t>(f[2], row_index);
    r.n_kernels = parse_number<std::size_t>(f[3], row_index);
    r.status = std::string(f[4]);
    r.dot_products = parse_number<std::uint64_t>(f[6], row_index);
    if (r.ok()) {
      r.wall_seconds = parse_number<double>(f[5], row_index);
      r.dot_products_per_second = parse_number<double>(f[7], row_index);
      if (!(r.wall_seconds > 0)) throw ParseError("wall_seconds must be positive", row_index, "row");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace rocketgrid::cli

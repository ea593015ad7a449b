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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bench.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "rocketgrid/error.hpp"
#include "rocketgrid/features.hpp"

using namespace rocketgrid;
using namespace rocketgrid::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "rocketgrid");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("rocketgrid_cli_" + std::to_string(counter_++) + "_" +
                                                 std::to_string(reinterpret_cast<std::uintptr_t>(this)))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

}  // namespace

TEST_CASE("config file sets limits and precision") {
  const RunConfig cfg = parse_config(
      "# engine\n"
      "max_x = 100\n"
      "max_y=7\n"
      "  workers_per_cell = 16  \n"
      "\n"
      "memory_budget_bytes = 4096\n"
      "precision = double\n"
      "threads = 0\n"
      "devices = 3\n");
  CHECK(cfg.limits.max_x == 100);
  CHECK(cfg.limits.max_y == 7);
  CHECK(cfg.limits.workers_per_cell == 16);
  CHECK(cfg.limits.memory_budget_bytes == 4096);
  CHECK(cfg.precision == Precision::kDouble);
  CHECK(cfg.threads == 0);
  CHECK(cfg.devices == 3);

  const RunConfig defaults = parse_config("");
  CHECK(defaults.limits.max_y == 65535);
  CHECK(defaults.precision == Precision::kSingle);
}

TEST_CASE("config errors carry the line number") {
  const auto line_of = [](const char* text) -> std::size_t {
    try {
      parse_config(text);
    } catch (const ParseError& e) {
      return e.location().value_or(0);
    }
    return 0;
  };
  CHECK(line_of("max_x = 1\nmax_y\n") == 2);
  CHECK(line_of("max_x = -1\n") == 1);
  CHECK(line_of("\n\nmax_y = 0\n") == 3);
  CHECK(line_of("precision = half\n") == 1);
  CHECK(line_of("colour = blue\n") == 1);
  CHECK(line_of("threads = 2x\n") == 1);
}

TEST_CASE("bench grid expands one factor at a time") {
  const auto points = expand_grid(BenchGrid{});
  REQUIRE(points.size() == 12);
  CHECK(points[0].varied == "n_instances");
  CHECK(points[0].n_instances == 50);
  CHECK(points[0].l_series == 1000);
  CHECK(points[0].n_kernels == 1000);
  CHECK(points[4].varied == "l_series");
  CHECK(points[4].n_instances == 100);
  CHECK(points[4].l_series == 250);
  CHECK(points[11].varied == "n_kernels");
  CHECK(points[11].n_kernels == 2000);
  CHECK(points[11].l_series == 1000);

  BenchGrid one;
  one.n_instances = {3};
  one.l_series = {40};
  one.n_kernels = {5};
  const auto single = expand_grid(one);
  REQUIRE(single.size() == 1);
  CHECK(single[0].varied == "none");
  CHECK(single[0].l_series == 40);

  BenchGrid empty;
  empty.n_kernels.clear();
  CHECK_THROWS_AS(expand_grid(empty), InvalidInput);
}

TEST_CASE("per-watt gain arithmetic") {
  CHECK(per_watt_gain(19.3, 350, 200) == doctest::Approx(11.028571428571428).epsilon(1e-15));
  CHECK(per_watt_gain(2.0, 100, 100) == 2.0);
  CHECK_THROWS_AS(per_watt_gain(0.0, 1, 1), InvalidInput);
  CHECK_THROWS_AS(per_watt_gain(1.0, -1, 1), InvalidInput);

  BenchReport r;
  r.nominal_watts_a = 350;
  r.nominal_watts_b = 200;
  attach_efficiency(r, 19.3);
  REQUIRE(r.per_watt_gain.has_value());
  CHECK(std::abs(*r.per_watt_gain - 11.0) <= 0.1);
  BenchReport no_watts;
  attach_efficiency(no_watts, 3.0);
  CHECK_FALSE(no_watts.per_watt_gain.has_value());
}

TEST_CASE("speedup is the lowest ratio over shared points") {
  const std::vector<BenchRow> ours{{"n_kernels", 10, 100, 50, "ok", 1.0, 0, 0},
                                   {"n_kernels", 10, 100, 100, "ok", 2.0, 0, 0},
                                   {"n_kernels", 10, 100, 200, "capacity", 0, 0, 0}};
  const std::vector<BenchRow> base{{"n_kernels", 10, 100, 50, "ok", 30.0, 0, 0},
                                   {"n_kernels", 10, 100, 100, "ok", 40.0, 0, 0},
                                   {"n_kernels", 10, 100, 200, "ok", 1.0, 0, 0}};
  CHECK(min_speedup(ours, base) == 20.0);
  const std::vector<BenchRow> other{{"n_kernels", 11, 100, 50, "ok", 1.0, 0, 0}};
  CHECK_THROWS_AS(min_speedup(other, base), InvalidInput);
}

TEST_CASE("doubling ratios pair each value with its half") {
  std::vector<BenchRow> rows;
  for (const std::size_t k : {250u, 500u, 1000u, 2000u}) {
    rows.push_back({"n_kernels", 100, 1000, k, "ok", static_cast<double>(k) / 100.0, 0, 0});
  }
  rows.push_back({"l_series", 100, 300, 1000, "ok", 1.0, 0, 0});
  rows.push_back({"l_series", 100, 500, 1000, "ok", 2.0, 0, 0});
  const auto ratios = doubling_ratios(rows);
  REQUIRE(ratios.size() == 3);
  for (const auto& r : ratios) {
    CHECK(r.varied == "n_kernels");
    CHECK(r.ratio == 2.0);
  }
  CHECK(ratios.back().value == 2000);
}

TEST_CASE("bench CSV round-trips and JSON mirrors it") {
  BenchReport r;
  r.rows.push_back({"l_series", 100, 250, 1000, "ok", 0.123456789012345, 1234567, 1234567 / 0.123456789012345});
  r.rows.push_back({"l_series", 100, 500, 1000, "capacity", 0, 2469134, 0});
  r.nominal_watts_a = 350;
  r.nominal_watts_b = 200;
  attach_efficiency(r, 19.3);

  const std::string csv = bench_csv(r);
  CHECK(csv.rfind(std::string(kBenchCsvHeader), 0) == 0);
  CHECK(parse_bench_csv(csv) == r.rows);

  const auto doc = nlohmann::json::parse(bench_json(r));
  CHECK(doc["schema"] == std::string(kBenchSchema));
  REQUIRE(doc["rows"].size() == 2);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& j = doc["rows"][i];
    const BenchRow& row = r.rows[i];
    CHECK(j["varied"] == row.varied);
    CHECK(j["n_instances"] == row.n_instances);
    CHECK(j["l_series"] == row.l_series);
    CHECK(j["n_kernels"] == row.n_kernels);
    CHECK(j["status"] == row.status);
    CHECK(j["dot_products"] == row.dot_products);
    if (row.ok()) {
      CHECK(j["wall_seconds"].get<double>() == row.wall_seconds);
      CHECK(j["dot_products_per_second"].get<double>() == row.dot_products_per_second);
    } else {
      CHECK(j["wall_seconds"].is_null());
    }
  }
  CHECK(doc["per_watt_gain"].get<double>() == *r.per_watt_gain);

  CHECK_THROWS_AS(parse_bench_csv("a,b\n"), ParseError);
  CHECK_THROWS_AS(parse_bench_csv(std::string(kBenchCsvHeader) + "\nx,1,2\n"), ParseError);
}

TEST_CASE("a one-point bench grid gives a one-row report") {
  BenchGrid grid;
  grid.n_instances = {4};
  grid.l_series = {64};
  grid.n_kernels = {10};
  BenchSettings settings;
  settings.repeats = 1;
  const BenchReport report = run_bench(grid, settings);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].ok());
  CHECK(report.rows[0].wall_seconds > 0);
  CHECK(report.rows[0].dot_products > 0);

  settings.run.limits.memory_budget_bytes = 16;
  const BenchReport capped = run_bench(grid, settings);
  CHECK(capped.rows[0].status == "capacity");
}

TEST_CASE("transform writes 2 or 3 features per kernel") {
  TempDir dir;
  REQUIRE(run({"synth", "--kind", "two-class", "--instances", "5", "--l-series", "40", "--out", dir / "d.ts"}).code ==
          0);
  const Result two = run({"transform", "--data", dir / "d.ts", "--kernels", "100", "--seed", "7", "--out",
                          dir / "f.bin"});
  CHECK(two.code == 0);
  CHECK(two.out.find("10 x 200") != std::string::npos);
  const FeatureMatrix f2 = FeatureMatrix::load_file(dir / "f.bin");
  CHECK(f2.rows() == 10);
  CHECK(f2.cols() == 200);

  CHECK(run({"transform", "--data", dir / "d.ts", "--kernels", "100", "--seed", "7", "--mpv", "--out",
             dir / "f3.bin"})
            .code == 0);
  CHECK(FeatureMatrix::load_file(dir / "f3.bin").cols() == 300);

  // same seed, same bytes
  CHECK(run({"transform", "--data", dir / "d.ts", "--kernels", "100", "--seed", "7", "--out", dir / "g.bin"})
            .code == 0);
  CHECK(slurp(dir / "f.bin") == slurp(dir / "g.bin"));

  // a saved bank and the reference path give the same features
  CHECK(run({"gen-kernels", "--data", dir / "d.ts", "--kernels", "100", "--seed", "7", "--out", dir / "bank.bin",
             "--json", dir / "bank.json"})
            .code == 0);
  CHECK(run({"transform", "--data", dir / "d.ts", "--bank", dir / "bank.bin", "--reference", "--out",
             dir / "r.bin"})
            .code == 0);
  CHECK(slurp(dir / "f.bin") == slurp(dir / "r.bin"));
  CHECK(nlohmann::json::parse(slurp(dir / "bank.json"))["kernels"].size() == 100);

  // config file, overridden by a flag
  {
    std::ofstream cfg(dir / "engine.cfg");
    cfg << "precision = double\nmax_y = 3\nworkers_per_cell = 4\ndevices = 2\n";
  }
  CHECK(run({"transform", "--data", dir / "d.ts", "--kernels", "20", "--config", dir / "engine.cfg", "--out",
             dir / "c.bin"})
            .code == 0);
  CHECK(FeatureMatrix::load_file(dir / "c.bin").precision() == Precision::kDouble);
  CHECK(run({"transform", "--data", dir / "d.ts", "--kernels", "20", "--config", dir / "engine.cfg",
             "--precision", "single", "--out", dir / "c2.bin"})
            .code == 0);
  CHECK(FeatureMatrix::load_file(dir / "c2.bin").precision() == Precision::kSingle);
}

TEST_CASE("exit codes") {
  TempDir dir;
  REQUIRE(run({"synth", "--kind", "two-class", "--instances", "6", "--l-series", "32", "--out", dir / "d.ts"}).code ==
          0);

  const Result missing = run({"transform", "--data", dir / "nope.ts", "--kernels", "5", "--out", dir / "x.bin"});
  CHECK(missing.code == 2);
  CHECK_FALSE(missing.err.empty());

  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"transform", "--data", dir / "d.ts"}).code == 2);  // --out is required
  CHECK(run({"--help"}).code == 0);

  const Result capacity =
      run({"transform", "--data", dir / "d.ts", "--kernels", "5", "--memory-budget", "8", "--out", dir / "x.bin"});
  CHECK(capacity.code == 3);
  CHECK(run({"transform", "--data", dir / "d.ts", "--kernels", "5", "--max-x", "4", "--out", dir / "x.bin"}).code ==
        3);

  {
    std::ofstream bad(dir / "bad.ts");
    bad << "@univariate true\n@classLabel true a\n@data\n1,2,x:a\n";
  }
  const Result parse = run({"transform", "--data", dir / "bad.ts", "--kernels", "5", "--out", dir / "x.bin"});
  CHECK(parse.code == 2);
  CHECK(parse.err.find("line 4") != std::string::npos);

  // bank shaped for another series length
  CHECK(run({"gen-kernels", "--l-series", "50", "--kernels", "5", "--out", dir / "b50.bin"}).code == 0);
  CHECK(run({"transform", "--data", dir / "d.ts", "--bank", dir / "b50.bin", "--out", dir / "x.bin"}).code == 2);
}

TEST_CASE("fit and predict") {
  TempDir dir;
  REQUIRE(run({"synth", "--kind", "two-class", "--instances", "30", "--l-series", "64", "--seed", "3", "--out",
               dir / "d.ts"})
              .code == 0);
  REQUIRE(run({"transform", "--data", dir / "d.ts", "--kernels", "200", "--out", dir / "f.bin", "--labels-out",
               dir / "y.txt"})
              .code == 0);

  const Result fit = run({"fit", "--features", dir / "f.bin", "--labels", dir / "y.txt", "--alpha", "1", "--out",
                          dir / "m.bin"});
  CHECK(fit.code == 0);
  CHECK(fit.out.find("training accuracy: 1") != std::string::npos);

  const Result search = run({"fit", "--features", dir / "f.bin", "--data", dir / "d.ts", "--alphas",
                             "0.01,0.1,1,10", "--out", dir / "m2.bin"});
  CHECK(search.code == 0);
  CHECK(search.out.find("alpha 10: validation accuracy") != std::string::npos);

  const Result pred = run({"predict", "--model", dir / "m.bin", "--features", dir / "f.bin", "--data", dir / "d.ts",
                           "--out", dir / "p.csv"});
  CHECK(pred.code == 0);
  CHECK(pred.out.find("accuracy: 1") != std::string::npos);
  const std::string labels = slurp(dir / "p.csv");
  CHECK(labels.rfind("row,label\n0,0\n", 0) == 0);

  // narrower feature file than the model expects
  REQUIRE(run({"transform", "--data", dir / "d.ts", "--kernels", "10", "--out", dir / "narrow.bin"}).code == 0);
  CHECK(run({"predict", "--model", dir / "m.bin", "--features", dir / "narrow.bin"}).code == 2);

  // one class only
  {
    std::ofstream one(dir / "one.txt");
    for (int i = 0; i < 60; ++i) one << "a\n";
  }
  CHECK(run({"fit", "--features", dir / "f.bin", "--labels", dir / "one.txt", "--out", dir / "m3.bin"}).code == 2);

  // label count mismatch
  {
    std::ofstream few(dir / "few.txt");
    few << "a\nb\n";
  }
  CHECK(run({"fit", "--features", dir / "f.bin", "--labels", dir / "few.txt", "--out", dir / "m4.bin"}).code == 2);
}

TEST_CASE("bench and report commands") {
  TempDir dir;
  const Result bench = run({"bench", "--n-instances", "2,4", "--l-series", "32", "--n-kernels", "8", "--repeats",
                            "1", "--out-csv", dir / "a.csv", "--out-json", dir / "a.json", "--plot-data",
                            dir / "plot.csv"});
  CHECK(bench.code == 0);
  const auto rows = parse_bench_csv(slurp(dir / "a.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].n_instances == 4);
  CHECK(nlohmann::json::parse(slurp(dir / "a.json"))["rows"].size() == 2);
  CHECK(slurp(dir / "plot.csv").rfind("varied,value,wall_seconds", 0) == 0);

  const Result report = run({"report", "--speedup", "19.3", "--watts-a", "350", "--watts-b", "200", "--out-json",
                             dir / "r.json"});
  CHECK(report.code == 0);
  CHECK(report.out.find("per_watt_gain: 11.0286") != std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(dir / "r.json"));
  CHECK(doc["per_watt_gain"].get<double>() == doctest::Approx(11.028571428571428));

  // two timing files: compare a run against itself scaled by 4
  {
    std::ofstream slow(dir / "slow.csv");
    BenchReport r;
    r.rows = rows;
    for (auto& row : r.rows) row.wall_seconds *= 4;
    slow << bench_csv(r);
  }
  const Result two = run({"report", "--timings", dir / "a.csv", "--baseline", dir / "slow.csv", "--watts-a", "100",
                          "--watts-b", "50"});
  CHECK(two.code == 0);
  CHECK(two.out.find("speedup: 4\n") != std::string::npos);
  CHECK(two.out.find("per_watt_gain: 2\n") != std::string::npos);

  CHECK(run({"report", "--watts-a", "1", "--watts-b", "1"}).code == 2);
  CHECK(run({"report", "--speedup", "2", "--watts-a", "0", "--watts-b", "1"}).code == 2);
}

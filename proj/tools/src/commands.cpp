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

#include "commands.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bench.hpp"
#include "config.hpp"
#include "rocketgrid/rocketgrid.hpp"

namespace rocketgrid::cli {
namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  out << text;
  if (!out) throw InvalidInput("failed writing " + path);
}

bool has_suffix(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Engine flags shared by transform and bench. Values given on the command
/// line win over the config file.
struct EngineFlags {
  std::string config_path;
  std::string precision;
  std::size_t threads = 0;
  std::size_t devices = 1;
  std::size_t workers_per_cell = 0;
  std::size_t max_x = 0;
  std::size_t max_y = 0;
  std::size_t memory_budget = 0;
  std::vector<CLI::Option*> opts;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value engine config file")->check(CLI::ExistingFile);
    opts = {
        app->add_option("--precision", precision, "single or double")->check(CLI::IsMember({"single", "double"})),
        app->add_option("--threads", threads, "OS threads per device (0 = all cores)"),
        app->add_option("--devices", devices, "emulated devices (instance shards)")->check(CLI::PositiveNumber),
        app->add_option("--workers-per-cell", workers_per_cell)->check(CLI::PositiveNumber),
        app->add_option("--max-x", max_x, "grid limit along kernels")->check(CLI::PositiveNumber),
        app->add_option("--max-y", max_y, "grid limit along instances per batch")->check(CLI::PositiveNumber),
        app->add_option("--memory-budget", memory_budget, "staging budget in bytes")->check(CLI::PositiveNumber),
    };
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (opts[0]->count()) cfg.precision = parse_precision(precision);
    if (opts[1]->count()) cfg.threads = threads;
    if (opts[2]->count()) cfg.devices = devices;
    if (opts[3]->count()) cfg.limits.workers_per_cell = workers_per_cell;
    if (opts[4]->count()) cfg.limits.max_x = max_x;
    if (opts[5]->count()) cfg.limits.max_y = max_y;
    if (opts[6]->count()) cfg.limits.memory_budget_bytes = memory_budget;
    return cfg;
  }
};

/// Labels from a one-per-line text file, or from a labelled dataset file.
std::vector<std::string> load_labels(const std::string& labels_path, const std::string& data_path,
                                     bool csv_labels) {
  if (!labels_path.empty()) {
    std::vector<std::string> out;
    std::istringstream in(read_text(labels_path));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) out.push_back(line);
    }
    return out;
  }
  const Dataset ds = load_dataset(data_path, csv_labels);
  if (!ds.has_labels()) throw InvalidInput(data_path + " has no class labels");
  return {ds.labels().begin(), ds.labels().end()};
}

void add_label_source(CLI::App* app, std::string& labels, std::string& data, bool& csv_labels) {
  auto* l = app->add_option("--labels", labels, "text file with one label per line")->check(CLI::ExistingFile);
  auto* d = app->add_option("--data", data, "dataset whose labels to use")->check(CLI::ExistingFile);
  l->excludes(d);
  app->add_flag("--csv-labels", csv_labels, "last CSV column of --data is the label");
}

void print_row(std::ostream& out, const BenchRow& r) {
  out << r.varied << " n=" << r.n_instances << " l=" << r.l_series << " k=" << r.n_kernels << ": ";
  if (r.ok()) {
    out << std::setprecision(4) << r.wall_seconds << " s, " << r.dot_products_per_second << " dot/s\n";
  } else {
    out << r.status << '\n';
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"rocketgrid: random convolutional kernel features on an emulated device grid"};
  app.require_subcommand(1);
  std::function<void()> action;

  // synth -------------------------------------------------------------------
  struct {
    std::string kind = "two-class";
    std::size_t instances = 100;
    std::size_t channels = 1;
    std::size_t length = 128;
    std::uint64_t seed = 0;
    double noise = 0.1;
    std::string out;
  } sy;
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  synth->add_option("--kind", sy.kind)->check(CLI::IsMember({"two-class", "random"}));
  synth->add_option("--instances", sy.instances, "total for random, per class for two-class")
      ->check(CLI::PositiveNumber);
  synth->add_option("--channels", sy.channels, "random only")->check(CLI::PositiveNumber);
  synth->add_option("--l-series", sy.length)->check(CLI::PositiveNumber);
  synth->add_option("--seed", sy.seed);
  synth->add_option("--noise", sy.noise, "two-class noise level");
  synth->add_option("--out", sy.out, "output path (.ts, .csv or binary)")->required();
  synth->callback([&] {
    action = [&] {
      const Dataset ds = sy.kind == "random" ? synth_random(sy.instances, sy.channels, sy.length, sy.seed)
                                             : synth_two_class(sy.instances, sy.length, sy.seed, sy.noise);
      save_dataset(ds, sy.out);
      out << "dataset: " << ds.n_instances() << " x " << ds.n_channels() << " x " << ds.l_series() << " -> "
          << sy.out << '\n';
    };
  });

  // gen-kernels ---------------------------------------------------------------
  struct {
    std::size_t length = 0;
    std::size_t channels = 1;
    std::string data;
    bool csv_labels = false;
    std::size_t kernels = 10000;
    std::uint64_t seed = 0;
    bool no_center = false;
    bool mpv = false;
    std::string out;
    std::string json;
  } gk;
  auto* gen = app.add_subcommand("gen-kernels", "sample a kernel bank");
  auto* gk_len = gen->add_option("--l-series", gk.length)->check(CLI::PositiveNumber);
  gen->add_option("--channels", gk.channels)->check(CLI::PositiveNumber);
  auto* gk_data = gen->add_option("--data", gk.data, "take l_series and channels from a dataset")
                      ->check(CLI::ExistingFile);
  gk_len->excludes(gk_data);
  gen->add_flag("--csv-labels", gk.csv_labels);
  gen->add_option("--kernels", gk.kernels)->check(CLI::PositiveNumber);
  gen->add_option("--seed", gk.seed);
  gen->add_flag("--no-center", gk.no_center, "keep raw normal weights");
  gen->add_flag("--mpv", gk.mpv, "mark the bank as producing mean-of-positive-values");
  gen->add_option("--out", gk.out, "binary bank file")->required();
  gen->add_option("--json", gk.json, "also dump the bank as JSON");
  gen->callback([&] {
    action = [&] {
      std::size_t length = gk.length;
      std::size_t channels = gk.channels;
      if (!gk.data.empty()) {
        const Dataset ds = load_dataset(gk.data, gk.csv_labels);
        length = ds.l_series();
        channels = ds.n_channels();
      }
      if (length == 0) throw InvalidInput("gen-kernels needs --l-series or --data");
      GenOptions opt;
      opt.seed = gk.seed;
      opt.center_weights = !gk.no_center;
      opt.include_mpv = gk.mpv;
      const KernelBank bank = generate_bank(length, channels, gk.kernels, opt);
      bank.save_file(gk.out);
      if (!gk.json.empty()) write_text(gk.json, bank.to_json() + "\n");
      out << "kernels: " << bank.size() << " for l_series " << length << ", " << channels << " channel(s) -> "
          << gk.out << '\n';
    };
  });

  // transform -------------------------------------------------------------------
  struct {
    std::string data;
    bool csv_labels = false;
    std::string bank;
    std::size_t kernels = 10000;
    std::uint64_t seed = 0;
    bool no_center = false;
    bool mpv = false;
    bool reference = false;
    std::string out;
    std::string labels_out;
    EngineFlags engine;
  } tr;
  auto* trans = app.add_subcommand("transform", "compute ppv/max(/mpv) features");
  trans->add_option("--data", tr.data, "input dataset (.ts, .csv or binary)")->required();
  trans->add_flag("--csv-labels", tr.csv_labels);
  auto* tr_bank = trans->add_option("--bank", tr.bank, "kernel bank file")->check(CLI::ExistingFile);
  auto* tr_k = trans->add_option("--kernels", tr.kernels, "generate this many kernels")->check(CLI::PositiveNumber);
  tr_bank->excludes(tr_k);
  trans->add_option("--seed", tr.seed);
  trans->add_flag("--no-center", tr.no_center);
  trans->add_flag("--mpv", tr.mpv, "add the mean-of-positive-values feature");
  trans->add_flag("--reference", tr.reference, "use the serial reference path");
  trans->add_option("--out", tr.out, "feature file (binary, or CSV if it ends in .csv)")->required();
  trans->add_option("--labels-out", tr.labels_out, "write the dataset labels, one per line");
  tr.engine.attach(trans);
  trans->callback([&] {
    action = [&] {
      const RunConfig cfg = tr.engine.resolve();
      const Dataset ds = load_dataset(tr.data, tr.csv_labels);
      KernelBank bank;
      if (!tr.bank.empty()) {
        bank = KernelBank::load_file(tr.bank);
      } else {
        GenOptions opt;
        opt.seed = tr.seed;
        opt.center_weights = !tr.no_center;
        opt.include_mpv = tr.mpv;
        bank = generate_bank(ds.l_series(), ds.n_channels(), tr.kernels, opt);
      }
      const bool mpv = tr.mpv || bank.options().include_mpv;
      const auto start = std::chrono::steady_clock::now();
      FeatureMatrix fm;
      if (tr.reference) {
        check_transform_shapes(ds, bank);
        fm = transform_reference(ds, bank, mpv, cfg.precision);
      } else if (cfg.devices > 1) {
        fm = transform_sharded(ds, bank, cfg.devices, cfg.engine_options(mpv));
      } else {
        fm = transform(ds, bank, cfg.engine_options(mpv));
      }
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      if (has_suffix(tr.out, ".csv")) {
        write_text(tr.out, fm.to_csv());
      } else {
        fm.save_file(tr.out);
      }
      if (!tr.labels_out.empty()) {
        if (!ds.has_labels()) throw InvalidInput(tr.data + " has no class labels");
        std::string text;
        for (const auto& l : ds.labels()) text += l + "\n";
        write_text(tr.labels_out, text);
      }
      out << "features: " << fm.rows() << " x " << fm.cols() << " (" << to_string(fm.precision()) << ") in "
          << std::setprecision(4) << elapsed.count() << " s -> " << tr.out << '\n';
    };
  });

  // fit -----------------------------------------------------------------------
  struct {
    std::string features;
    std::string labels;
    std::string data;
    bool csv_labels = false;
    double alpha = 1.0;
    std::vector<double> alphas;
    double validation_fraction = 0.25;
    std::uint64_t seed = 0;
    bool no_standardize = false;
    std::string out;
  } ft;
  auto* fit = app.add_subcommand("fit", "fit a ridge classifier on features");
  fit->add_option("--features", ft.features, "binary feature file")->required()->check(CLI::ExistingFile);
  add_label_source(fit, ft.labels, ft.data, ft.csv_labels);
  auto* ft_alpha = fit->add_option("--alpha", ft.alpha)->check(CLI::PositiveNumber);
  auto* ft_alphas = fit->add_option("--alphas", ft.alphas, "choose alpha on a validation split")->delimiter(',');
  ft_alpha->excludes(ft_alphas);
  fit->add_option("--validation-fraction", ft.validation_fraction)->check(CLI::Range(0.01, 0.99));
  fit->add_option("--seed", ft.seed, "validation split seed");
  fit->add_flag("--no-standardize", ft.no_standardize);
  fit->add_option("--out", ft.out, "model file")->required();
  fit->callback([&] {
    action = [&] {
      if (ft.labels.empty() && ft.data.empty()) throw InvalidInput("fit needs --labels or --data");
      const FeatureMatrix fm = FeatureMatrix::load_file(ft.features);
      const auto labels = load_labels(ft.labels, ft.data, ft.csv_labels);
      if (labels.size() != fm.rows()) {
        throw InvalidInput("label count " + std::to_string(labels.size()) + " does not match " +
                           std::to_string(fm.rows()) + " feature rows");
      }
      RidgeOptions opt;
      opt.alpha = ft.alpha;
      opt.standardize = !ft.no_standardize;
      if (!ft.alphas.empty()) {
        // Split row indices; the selected alpha is then refit on every row.
        std::vector<std::size_t> order(fm.rows());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        SplitMix64 rng(ft.seed);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        const auto n_val = static_cast<std::size_t>(ft.validation_fraction * static_cast<double>(order.size()));
        if (n_val == 0 || n_val == order.size()) throw InvalidInput("validation split leaves an empty side");
        const auto gather = [&](std::size_t from, std::size_t to, std::vector<double>& x,
                                std::vector<std::string>& y) {
          for (std::size_t i = from; i < to; ++i) {
            const auto row = fm.row(order[i]);
            x.insert(x.end(), row.begin(), row.end());
            y.push_back(labels[order[i]]);
          }
        };
        std::vector<double> xt, xv;
        std::vector<std::string> yt, yv;
        gather(n_val, order.size(), xt, yt);
        gather(0, n_val, xv, yv);
        const AlphaSearch s = select_alpha({xt, yt.size(), fm.cols()}, yt, {xv, yv.size(), fm.cols()}, yv,
                                           ft.alphas, opt);
        for (std::size_t i = 0; i < ft.alphas.size(); ++i) {
          out << "alpha " << ft.alphas[i] << ": validation accuracy " << s.validation_accuracy[i] << '\n';
        }
        opt.alpha = s.best_alpha;
      }
      const RidgeModel model = fit_classifier(MatrixView::of(fm), labels, opt);
      model.save_file(ft.out);
      const double acc = accuracy(model.predict(MatrixView::of(fm)), labels);
      out << "model: " << model.n_outputs() << " class output(s), " << model.n_features() << " features, alpha "
          << opt.alpha << " -> " << ft.out << '\n'
          << "training accuracy: " << acc << '\n';
    };
  });
  (void)ft_alpha;

  // predict -------------------------------------------------------------------
  struct {
    std::string model;
    std::string features;
    std::string out;
    std::string labels;
    std::string data;
    bool csv_labels = false;
  } pr;
  auto* pred = app.add_subcommand("predict", "apply a ridge model to features");
  pred->add_option("--model", pr.model)->required()->check(CLI::ExistingFile);
  pred->add_option("--features", pr.features)->required()->check(CLI::ExistingFile);
  pred->add_option("--out", pr.out, "predicted labels CSV");
  add_label_source(pred, pr.labels, pr.data, pr.csv_labels);
  pred->callback([&] {
    action = [&] {
      const RidgeModel model = RidgeModel::load_file(pr.model);
      const FeatureMatrix fm = FeatureMatrix::load_file(pr.features);
      const auto predicted = model.predict(MatrixView::of(fm));
      if (!pr.out.empty()) {
        std::string text = "row,label\n";
        for (std::size_t i = 0; i < predicted.size(); ++i) text += std::to_string(i) + "," + predicted[i] + "\n";
        write_text(pr.out, text);
      }
      out << "predicted " << predicted.size() << " row(s)\n";
      if (!pr.labels.empty() || !pr.data.empty()) {
        const auto truth = load_labels(pr.labels, pr.data, pr.csv_labels);
        out << "accuracy: " << accuracy(predicted, truth) << '\n';
      }
    };
  });

  // bench -----------------------------------------------------------------------
  struct {
    BenchGrid grid;
    BenchSettings settings;
    std::string engine = "grid";
    std::string out_csv;
    std::string out_json;
    std::string plot;
    std::string baseline;
    std::optional<double> watts_a;
    std::optional<double> watts_b;
    EngineFlags engine_flags;
  } bn;
  auto* bench = app.add_subcommand("bench", "time the transform over a one-factor-at-a-time grid");
  bench->add_option("--n-instances", bn.grid.n_instances)->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--l-series", bn.grid.l_series)->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--n-kernels", bn.grid.n_kernels)->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--base-instances", bn.grid.base_instances)->check(CLI::PositiveNumber);
  bench->add_option("--base-length", bn.grid.base_length)->check(CLI::PositiveNumber);
  bench->add_option("--base-kernels", bn.grid.base_kernels)->check(CLI::PositiveNumber);
  bench->add_option("--channels", bn.settings.n_channels)->check(CLI::PositiveNumber);
  bench->add_option("--repeats", bn.settings.repeats, "keep the fastest of this many runs")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bn.settings.seed);
  bench->add_flag("--mpv", bn.settings.include_mpv);
  bench->add_option("--engine", bn.engine, "grid or reference")->check(CLI::IsMember({"grid", "reference"}));
  bench->add_option("--out-csv", bn.out_csv);
  bench->add_option("--out-json", bn.out_json);
  bench->add_option("--plot-data", bn.plot, "CSV of (varied, value, time) for plotting");
  bench->add_option("--baseline", bn.baseline, "timing CSV of the baseline device")->check(CLI::ExistingFile);
  bench->add_option("--watts-a", bn.watts_a, "nominal watts of this device")->check(CLI::PositiveNumber);
  bench->add_option("--watts-b", bn.watts_b, "nominal watts of the baseline device")->check(CLI::PositiveNumber);
  bn.engine_flags.attach(bench);
  bench->callback([&] {
    action = [&] {
      bn.settings.run = bn.engine_flags.resolve();
      bn.settings.engine = bn.engine == "reference" ? BenchEngine::kReference : BenchEngine::kGrid;
      BenchReport report = run_bench(bn.grid, bn.settings, [&](const BenchRow& r) { print_row(out, r); });
      report.nominal_watts_a = bn.watts_a;
      report.nominal_watts_b = bn.watts_b;
      if (!bn.baseline.empty()) {
        attach_efficiency(report, min_speedup(report.rows, parse_bench_csv(read_text(bn.baseline))));
        out << "speedup (lowest): " << *report.speedup << '\n';
        if (report.per_watt_gain) out << "per_watt_gain: " << *report.per_watt_gain << '\n';
      }
      for (const DoublingRatio& d : doubling_ratios(report.rows)) {
        out << "ratio " << d.varied << " " << d.value / 2 << " -> " << d.value << ": " << d.ratio << '\n';
      }
      if (!bn.out_csv.empty()) write_text(bn.out_csv, bench_csv(report));
      if (!bn.out_json.empty()) write_text(bn.out_json, bench_json(report));
      if (!bn.plot.empty()) write_text(bn.plot, plot_data(report));
    };
  });

  // report ----------------------------------------------------------------------
  struct {
    std::optional<double> speedup;
    std::string timings;
    std::string baseline;
    double watts_a = 0;
    double watts_b = 0;
    std::string out_json;
  } rp;
  auto* report = app.add_subcommand("report", "speedup and per-watt gain from timings or a given speedup");
  auto* rp_speedup = report->add_option("--speedup", rp.speedup)->check(CLI::PositiveNumber);
  auto* rp_timings = report->add_option("--timings", rp.timings, "bench CSV of this device")
                         ->check(CLI::ExistingFile);
  auto* rp_baseline = report->add_option("--baseline", rp.baseline, "bench CSV of the baseline device")
                          ->check(CLI::ExistingFile);
  rp_speedup->excludes(rp_timings)->excludes(rp_baseline);
  rp_timings->needs(rp_baseline);
  rp_baseline->needs(rp_timings);
  report->add_option("--watts-a", rp.watts_a, "nominal watts of this device")->required()->check(CLI::PositiveNumber);
  report->add_option("--watts-b", rp.watts_b, "nominal watts of the baseline device")
      ->required()
      ->check(CLI::PositiveNumber);
  report->add_option("--out-json", rp.out_json);
  report->callback([&] {
    action = [&] {
      BenchReport r;
      std::optional<double> speedup = rp.speedup;
      if (!speedup) {
        if (rp.timings.empty()) throw InvalidInput("report needs --speedup or --timings with --baseline");
        r.rows = parse_bench_csv(read_text(rp.timings));
        speedup = min_speedup(r.rows, parse_bench_csv(read_text(rp.baseline)));
      }
      r.nominal_watts_a = rp.watts_a;
      r.nominal_watts_b = rp.watts_b;
      attach_efficiency(r, speedup);
      out << std::setprecision(6) << "speedup: " << *r.speedup << '\n'
          << "watts: " << rp.watts_a << " vs " << rp.watts_b << '\n'
          << "per_watt_gain: " << *r.per_watt_gain << '\n';
      if (!rp.out_json.empty()) write_text(rp.out_json, bench_json(r));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    action();
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace rocketgrid::cli

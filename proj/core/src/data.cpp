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

#include "rocketgrid/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "rocketgrid/binary_io.hpp"
#include "rocketgrid/error.hpp"
#include "rocketgrid/rng.hpp"

namespace rocketgrid {

namespace {

constexpr char kDatasetMagic[5] = "RGDS";
constexpr std::uint32_t kDatasetVersion = 1;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) words.push_back(s.substr(i, j - i));
    i = j;
  }
  return words;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<double> parse_real(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

bool parse_bool(std::string_view word, std::size_t line_no, std::string_view directive) {
  const std::string w = lower(word);
  if (w == "true") return true;
  if (w == "false") return false;
  throw ParseError("expected true/false after " + std::string(directive), line_no);
}

std::size_t parse_count(std::string_view word, std::size_t line_no, std::string_view directive) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || ptr != word.data() + word.size() || value == 0) {
    throw ParseError("expected a positive integer after " + std::string(directive), line_no);
  }
  return value;
}

// Lines split on '\n'; line numbers are 1-based.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string format_real(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void check_label_token(const std::string& label, std::string_view separators) {
  if (label.empty() || label.find_first_of(separators) != std::string::npos) {
    throw InvalidInput("label '" + label + "' cannot be written in this text format");
  }
}

}  // namespace

Dataset::Dataset(std::string name, std::size_t n_instances, std::size_t n_channels,
                 std::size_t l_series, std::vector<double> values,
                 std::optional<std::vector<std::string>> labels)
    : name_(std::move(name)),
      n_instances_(n_instances),
      n_channels_(n_channels),
      l_series_(l_series),
      values_(std::move(values)),
      labels_(std::move(labels)) {
  if (n_channels_ == 0) throw InvalidInput("dataset needs at least one channel");
  if (n_instances_ > 0 && l_series_ == 0) throw InvalidInput("dataset series must be non-empty");
  if (values_.size() != n_instances_ * n_channels_ * l_series_) {
    throw InvalidInput("dataset value block does not match its shape");
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidInput("dataset values must be finite");
  }
  if (labels_ && labels_->size() != n_instances_) {
    throw InvalidInput("dataset needs one label per instance");
  }
}

SeriesView<double> Dataset::instance(std::size_t i) const {
  const std::size_t stride = values_per_instance();
  return SeriesView<double>{std::span<const double>(values_).subspan(i * stride, stride),
                            n_channels_, l_series_};
}

std::span<const std::string> Dataset::labels() const noexcept {
  if (!labels_) return {};
  return *labels_;
}

Dataset Dataset::select(std::span<const std::size_t> rows) const {
  const std::size_t stride = values_per_instance();
  std::vector<double> values;
  values.reserve(rows.size() * stride);
  std::optional<std::vector<std::string>> labels;
  if (labels_) labels.emplace();
  for (const std::size_t r : rows) {
    if (r >= n_instances_) throw InvalidInput("row index out of range");
    const auto first = values_.begin() + static_cast<std::ptrdiff_t>(r * stride);
    values.insert(values.end(), first, first + static_cast<std::ptrdiff_t>(stride));
    if (labels_) labels->push_back((*labels_)[r]);
  }
  return Dataset(name_, rows.size(), n_channels_, l_series_, std::move(values), std::move(labels));
}

void Dataset::save(std::ostream& out) const {
  using namespace binio;
  write_header(out, kDatasetMagic, kDatasetVersion);
  write_string(out, name_);
  write<std::uint64_t>(out, n_instances_);
  write<std::uint64_t>(out, n_channels_);
  write<std::uint64_t>(out, l_series_);
  write<std::uint8_t>(out, labels_ ? 1 : 0);
  write_array<double>(out, values_);
  if (labels_) {
    for (const auto& l : *labels_) write_string(out, l);
  }
  if (!out) throw std::runtime_error("failed writing dataset");
}

Dataset Dataset::load(std::istream& in) {
  using namespace binio;
  read_header(in, kDatasetMagic, kDatasetVersion);
  std::string name = read_string(in);
  const auto n = read<std::uint64_t>(in);
  const auto c = read<std::uint64_t>(in);
  const auto l = read<std::uint64_t>(in);
  const bool has_labels = read<std::uint8_t>(in) != 0;
  auto values = read_array<double>(in, n * c * l);
  std::optional<std::vector<std::string>> labels;
  if (has_labels) {
    labels.emplace();
    for (std::uint64_t i = 0; i < n; ++i) labels->push_back(read_string(in));
  }
  try {
    return Dataset(std::move(name), n, c, l, std::move(values), std::move(labels));
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("invalid dataset: ") + e.what());
  }
}

Dataset parse_ts(std::string_view text) {
  std::string name;
  std::optional<bool> univariate;
  std::optional<std::size_t> dimensions;
  std::optional<std::size_t> series_length;
  bool has_labels = false;
  std::vector<std::string> class_labels;
  bool in_data = false;

  std::size_t n_instances = 0;
  std::optional<std::size_t> n_channels;
  std::optional<std::size_t> l_series;
  std::vector<double> values;
  std::vector<std::string> labels;

  const auto lines = lines_of(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const std::size_t line_no = idx + 1;
    const std::string_view line = trim(lines[idx]);
    if (line.empty() || line.front() == '#') continue;

    if (!in_data) {
      if (line.front() != '@') throw ParseError("expected a directive before @data", line_no);
      const auto words = split_ws(line);
      const std::string directive = lower(words.front());
      const auto arg = [&](std::size_t i) -> std::string_view {
        if (words.size() <= i) throw ParseError(directive + " is missing its value", line_no);
        return words[i];
      };
      if (directive == "@problemname") {
        name = std::string(trim(line.substr(words.front().size())));
      } else if (directive == "@univariate") {
        univariate = parse_bool(arg(1), line_no, directive);
      } else if (directive == "@dimension" || directive == "@dimensions") {
        dimensions = parse_count(arg(1), line_no, directive);
      } else if (directive == "@equallength") {
        if (!parse_bool(arg(1), line_no, directive)) {
          throw ParseError("only equal-length series are supported", line_no);
        }
      } else if (directive == "@serieslength") {
        series_length = parse_count(arg(1), line_no, directive);
      } else if (directive == "@classlabel") {
        has_labels = parse_bool(arg(1), line_no, directive);
        if (has_labels) {
          for (std::size_t i = 2; i < words.size(); ++i) class_labels.emplace_back(words[i]);
          if (class_labels.empty()) throw ParseError("@classLabel true lists no classes", line_no);
        }
      } else if (directive == "@timestamps") {
        if (parse_bool(arg(1), line_no, directive)) {
          throw ParseError("timestamped series are not supported", line_no);
        }
      } else if (directive == "@missing") {
        if (parse_bool(arg(1), line_no, directive)) {
          throw ParseError("missing values are not supported", line_no);
        }
      } else if (directive == "@data") {
        in_data = true;
        if (univariate && *univariate && dimensions && *dimensions != 1) {
          throw ParseError("@univariate true conflicts with @dimension", line_no);
        }
      }
      // Other directives (@targetLabel, ...) carry no information we use.
      continue;
    }

    auto fields = split(line, ':');
    if (has_labels) {
      if (fields.size() < 2) throw ParseError("data line has no class label", line_no);
      const std::string label(trim(fields.back()));
      if (std::find(class_labels.begin(), class_labels.end(), label) == class_labels.end()) {
        throw ParseError("unknown class label '" + label + "'", line_no);
      }
      labels.push_back(label);
      fields.pop_back();
    }
    if (!n_channels) {
      n_channels = fields.size();
      if (univariate && *univariate && *n_channels != 1) {
        throw ParseError("@univariate true but line has " + std::to_string(*n_channels) + " channels",
                         line_no);
      }
      if (dimensions && *n_channels != *dimensions) {
        throw ParseError("expected " + std::to_string(*dimensions) + " channels, found " +
                             std::to_string(*n_channels), line_no);
      }
    } else if (fields.size() != *n_channels) {
      throw ParseError("expected " + std::to_string(*n_channels) + " channels, found " +
                           std::to_string(fields.size()), line_no);
    }
    for (const auto field : fields) {
      const auto tokens = split(field, ',');
      if (!l_series) {
        l_series = tokens.size();
        if (series_length && *l_series != *series_length) {
          throw ParseError("expected series length " + std::to_string(*series_length) +
                               ", found " + std::to_string(*l_series), line_no);
        }
      } else if (tokens.size() != *l_series) {
        throw ParseError("unequal series length: expected " + std::to_string(*l_series) +
                             ", found " + std::to_string(tokens.size()), line_no);
      }
      for (const auto token : tokens) {
        const auto v = parse_real(token);
        if (!v) throw ParseError("malformed number '" + std::string(trim(token)) + "'", line_no);
        values.push_back(*v);
      }
    }
    ++n_instances;
  }

  if (!in_data) throw ParseError("missing @data section", lines.size() + 1);

  const std::size_t channels = n_channels.value_or(dimensions.value_or(1));
  const std::size_t length = l_series.value_or(series_length.value_or(0));
  std::optional<std::vector<std::string>> label_column;
  if (has_labels) label_column = std::move(labels);
  return Dataset(name, n_instances, channels, length, std::move(values), std::move(label_column));
}

Dataset parse_csv(std::string_view text, bool has_labels) {
  std::vector<double> values;
  std::vector<std::string> labels;
  std::optional<std::size_t> width;
  std::size_t row = 0;
  for (const auto raw : lines_of(text)) {
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (has_labels) {
      if (cells.size() < 2) throw ParseError("row has no label column", row, "row");
      labels.emplace_back(trim(cells.back()));
      cells.pop_back();
    }
    if (!width) {
      width = cells.size();
    } else if (cells.size() != *width) {
      throw ParseError("ragged row: expected " + std::to_string(*width) + " values, found " +
                           std::to_string(cells.size()), row, "row");
    }
    for (const auto cell : cells) {
      const auto v = parse_real(cell);
      if (!v) throw ParseError("malformed number '" + std::string(trim(cell)) + "'", row, "row");
      values.push_back(*v);
    }
    ++row;
  }
  std::optional<std::vector<std::string>> label_column;
  if (has_labels) label_column = std::move(labels);
  return Dataset("", row, 1, width.value_or(0), std::move(values), std::move(label_column));
}

std::string to_ts(const Dataset& dataset) {
  std::ostringstream out;
  if (!dataset.name().empty()) out << "@problemName " << dataset.name() << '\n';
  out << "@timeStamps false\n@missing false\n";
  out << "@univariate " << (dataset.n_channels() == 1 ? "true" : "false") << '\n';
  if (dataset.n_channels() > 1) out << "@dimensions " << dataset.n_channels() << '\n';
  out << "@equalLength true\n";
  if (dataset.l_series() > 0) out << "@seriesLength " << dataset.l_series() << '\n';
  if (dataset.has_labels()) {
    std::vector<std::string> classes;
    for (const auto& l : dataset.labels()) {
      check_label_token(l, ":, \t\r\n");
      if (std::find(classes.begin(), classes.end(), l) == classes.end()) classes.push_back(l);
    }
    out << "@classLabel true";
    for (const auto& c : classes) out << ' ' << c;
    out << '\n';
  } else {
    out << "@classLabel false\n";
  }
  out << "@data\n";
  for (std::size_t i = 0; i < dataset.n_instances(); ++i) {
    const auto series = dataset.instance(i);
    for (std::size_t c = 0; c < series.n_channels; ++c) {
      if (c > 0) out << ':';
      const auto ch = series.channel(c);
      for (std::size_t t = 0; t < ch.size(); ++t) {
        if (t > 0) out << ',';
        out << format_real(ch[t]);
      }
    }
    if (dataset.has_labels()) out << ':' << dataset.labels()[i];
    out << '\n';
  }
  return out.str();
}

std::string to_csv(const Dataset& dataset) {
  if (dataset.n_channels() != 1) throw InvalidInput("CSV export supports univariate datasets only");
  std::ostringstream out;
  for (std::size_t i = 0; i < dataset.n_instances(); ++i) {
    const auto ch = dataset.instance(i).channel(0);
    for (std::size_t t = 0; t < ch.size(); ++t) {
      if (t > 0) out << ',';
      out << format_real(ch[t]);
    }
    if (dataset.has_labels()) {
      check_label_token(dataset.labels()[i], ",\r\n");
      out << ',' << dataset.labels()[i];
    }
    out << '\n';
  }
  return out.str();
}

namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         lower(std::string_view(s).substr(s.size() - suffix.size())) == suffix;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Dataset load_dataset(const std::string& path, bool csv_has_labels) {
  if (ends_with(path, ".ts")) return parse_ts(read_text(path));
  if (ends_with(path, ".csv")) return parse_csv(read_text(path), csv_has_labels);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Dataset::load(in);
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  if (ends_with(path, ".ts")) {
    out << to_ts(dataset);
  } else if (ends_with(path, ".csv")) {
    out << to_csv(dataset);
  } else {
    dataset.save(out);
  }
}

Dataset synth_random(std::size_t n_instances, std::size_t n_channels, std::size_t l_series,
                     std::uint64_t seed) {
  if (n_instances == 0 || n_channels == 0 || l_series == 0) {
    throw InvalidInput("synthetic dataset dimensions must be positive");
  }
  SplitMix64 rng(seed);
  std::vector<double> values(n_instances * n_channels * l_series);
  for (double& v : values) v = rng.normal();
  return Dataset("random", n_instances, n_channels, l_series, std::move(values));
}

Dataset synth_two_class(std::size_t n_per_class, std::size_t l_series, std::uint64_t seed,
                        double noise) {
  if (n_per_class == 0 || l_series < 8) {
    throw InvalidInput("two-class fixture needs n_per_class >= 1 and l_series >= 8");
  }
  SplitMix64 rng(seed);
  std::vector<double> values;
  values.reserve(2 * n_per_class * l_series);
  std::vector<std::string> labels;
  for (int cls = 0; cls < 2; ++cls) {
    const double period = static_cast<double>(l_series) / (cls == 0 ? 4.0 : 8.0);
    for (std::size_t i = 0; i < n_per_class; ++i) {
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (std::size_t t = 0; t < l_series; ++t) {
        const double signal = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);
        values.push_back(signal + noise * rng.normal());
      }
      labels.push_back(std::to_string(cls));
    }
  }
  return Dataset("two_class", 2 * n_per_class, 1, l_series, std::move(values), std::move(labels));
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double fraction,
                                          std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidInput("split fraction must lie in [0, 1]");
  std::vector<std::size_t> order(dataset.n_instances());
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  const auto head = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(order.size())));
  const std::span<const std::size_t> all(order);
  return {dataset.select(all.first(head)), dataset.select(all.subspan(head))};
}

}  // namespace rocketgrid

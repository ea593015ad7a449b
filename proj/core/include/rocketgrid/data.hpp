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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rocketgrid/series.hpp"

namespace rocketgrid {

/// Equal-length multichannel time series, stored as one contiguous block in
/// (instance, channel, time) order. Values are kept in double precision so
/// text inputs round-trip; the engine converts to its working precision when
/// it stages a batch.
class Dataset {
 public:
  Dataset() = default;

  /// Throws InvalidInput unless values.size() == n_instances * n_channels *
  /// l_series, all values are finite, and labels (if any) has one entry per
  /// instance.
  Dataset(std::string name, std::size_t n_instances, std::size_t n_channels, std::size_t l_series,
          std::vector<double> values, std::optional<std::vector<std::string>> labels = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  std::size_t n_instances() const noexcept { return n_instances_; }
  std::size_t n_channels() const noexcept { return n_channels_; }
  std::size_t l_series() const noexcept { return l_series_; }
  std::size_t values_per_instance() const noexcept { return n_channels_ * l_series_; }

  const std::vector<double>& values() const noexcept { return values_; }
  SeriesView<double> instance(std::size_t i) const;

  bool has_labels() const noexcept { return labels_.has_value(); }
  /// Empty when unlabeled.
  std::span<const std::string> labels() const noexcept;

  /// Rows in the given order (indices may repeat).
  Dataset select(std::span<const std::size_t> rows) const;

  bool operator==(const Dataset&) const = default;

  /// Binary cache ("RGDS"): header, f64 values, then labels.
  void save(std::ostream& out) const;
  static Dataset load(std::istream& in);

 private:
  std::string name_;
  std::size_t n_instances_ = 0;
  std::size_t n_channels_ = 1;
  std::size_t l_series_ = 0;
  std::vector<double> values_;
  std::optional<std::vector<std::string>> labels_;
};

/// Parses the equal-length subset of the `.ts` text format. Throws ParseError
/// carrying the 1-based line number of the offending line.
Dataset parse_ts(std::string_view text);

/// One univariate instance per row; with has_labels the last column is the
/// label. Throws ParseError carrying the 0-based row index.
Dataset parse_csv(std::string_view text, bool has_labels);

/// Serializers for the two text formats; values use 17 significant digits.
std::string to_ts(const Dataset& dataset);
std::string to_csv(const Dataset& dataset);

/// Loads by extension: .ts, .csv (labels in the last column when
/// csv_has_labels), anything else as the binary cache.
Dataset load_dataset(const std::string& path, bool csv_has_labels = false);
void save_dataset(const Dataset& dataset, const std::string& path);

/// Standard-normal values, no labels. Throws InvalidInput on zero dimensions.
Dataset synth_random(std::size_t n_instances, std::size_t n_channels, std::size_t l_series,
                     std::uint64_t seed);

/// Two sine classes: label "0" has period l_series/4, label "1" period
/// l_series/8, each with a random phase and Gaussian noise of standard
/// deviation `noise`. Class 0 rows come first.
Dataset synth_two_class(std::size_t n_per_class, std::size_t l_series, std::uint64_t seed,
                        double noise = 0.1);

/// Deterministic shuffled split; the first part holds round(fraction * n) rows.
std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double fraction,
                                          std::uint64_t seed);

}  // namespace rocketgrid

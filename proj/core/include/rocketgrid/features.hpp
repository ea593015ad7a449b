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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rocketgrid {

enum class Precision : std::uint8_t { kSingle = 1, kDouble = 2 };

std::string_view to_string(Precision p);
/// Accepts "single"/"float"/"f32" and "double"/"f64".
Precision parse_precision(std::string_view s);

/// Row-major feature table: row i, kernel k holds [ppv, max] or
/// [ppv, max, mpv] starting at column k * features_per_kernel.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t n_instances, std::size_t n_kernels, std::size_t features_per_kernel,
                Precision precision);

  std::size_t rows() const noexcept { return n_instances_; }
  std::size_t cols() const noexcept { return n_kernels_ * features_per_kernel_; }
  std::size_t n_kernels() const noexcept { return n_kernels_; }
  std::size_t features_per_kernel() const noexcept { return features_per_kernel_; }
  bool has_mpv() const noexcept { return features_per_kernel_ == 3; }
  Precision precision() const noexcept { return precision_; }

  double& at(std::size_t row, std::size_t col) { return values_[row * cols() + col]; }
  double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }

  double ppv(std::size_t row, std::size_t kernel) const { return at(row, kernel * features_per_kernel_); }
  double max(std::size_t row, std::size_t kernel) const { return at(row, kernel * features_per_kernel_ + 1); }
  double mpv(std::size_t row, std::size_t kernel) const { return at(row, kernel * features_per_kernel_ + 2); }

  std::span<double> row(std::size_t i) { return std::span<double>(values_).subspan(i * cols(), cols()); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * cols(), cols());
  }
  std::span<double> rows_block(std::size_t first, std::size_t count) {
    return std::span<double>(values_).subspan(first * cols(), count * cols());
  }

  const std::vector<double>& values() const noexcept { return values_; }

  /// Appends the rows of `other`, which must have identical column layout.
  void append_rows(const FeatureMatrix& other);

  /// Bitwise comparison of shape and every value (distinguishes -0.0 from 0.0).
  bool bit_equal(const FeatureMatrix& other) const;
  bool operator==(const FeatureMatrix&) const = default;

  /// Versioned little-endian binary ("RGFM"); values stored as f32 for single
  /// precision and f64 for double.
  void save(std::ostream& out) const;
  static FeatureMatrix load(std::istream& in);
  void save_file(const std::string& path) const;
  static FeatureMatrix load_file(const std::string& path);

  /// Header row ppv_0,max_0[,mpv_0],ppv_1,... then one line per instance.
  std::string to_csv() const;

 private:
  std::size_t n_instances_ = 0;
  std::size_t n_kernels_ = 0;
  std::size_t features_per_kernel_ = 2;
  Precision precision_ = Precision::kSingle;
  std::vector<double> values_;
};

}  // namespace rocketgrid

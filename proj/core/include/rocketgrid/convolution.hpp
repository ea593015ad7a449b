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
#include <span>
#include <vector>

#include "rocketgrid/data.hpp"
#include "rocketgrid/features.hpp"
#include "rocketgrid/kernelgen.hpp"
#include "rocketgrid/series.hpp"

namespace rocketgrid {

/// Kernel parameters in working precision T. Weights are channel-major, as in
/// KernelView.
template <typename T>
struct KernelParams {
  int length = 0;
  T bias = 0;
  int dilation = 1;
  int padding = 0;
  std::span<const T> weights;
  std::span<const int> channels;
};

/// A KernelBank with weights and biases rounded once to T.
template <typename T>
class PreparedBank {
 public:
  explicit PreparedBank(const KernelBank& bank);

  std::size_t size() const noexcept { return lengths_.size(); }
  KernelParams<T> operator[](std::size_t k) const;

 private:
  std::vector<int> lengths_;
  std::vector<T> weights_;
  std::vector<T> biases_;
  std::vector<int> dilations_;
  std::vector<int> paddings_;
  std::vector<int> channels_;
  std::vector<std::size_t> weight_offsets_;
  std::vector<std::size_t> channel_offsets_;
};

struct FeatureTriple {
  double ppv = 0.0;
  double max = 0.0;
  double mpv = 0.0;
};

/// Number of dot-product positions: l_series + 2p - (l_kernel - 1) * d.
/// Throws InvalidInput when the kernel does not fit at any position.
std::size_t output_length(std::size_t l_series, int l_kernel, int dilation, int padding);

/// Kernel response at output position t:
///   bias + sum over selected channels c (ascending) of
///          sum over taps j (ascending) of w[c][j] * x[c][t - p + j*d]
/// Taps that land in the padding are skipped. The accumulation order is
/// fixed; the engine reproduces it exactly.
template <typename T>
T dot_at(const SeriesView<T>& series, const KernelParams<T>& kernel, std::size_t position);

/// PPV (fraction of strictly positive responses), MAX, and optionally MPV
/// (mean of the strictly positive responses, 0 when there are none) of one
/// kernel over one series. Throws InvalidInput on non-finite series values.
template <typename T>
FeatureTriple apply_kernel(const SeriesView<T>& series, const KernelParams<T>& kernel,
                           bool include_mpv);

/// ppv = count / l_out and mpv = exact_sum / count, rounded to T. Shared by
/// every transform so that equal counts and sums give equal features.
template <typename T>
T finalize_ppv(std::size_t positive_count, std::size_t l_out) {
  return static_cast<T>(static_cast<double>(positive_count) / static_cast<double>(l_out));
}

template <typename T>
T finalize_mpv(double exact_positive_sum, std::size_t positive_count) {
  if (positive_count == 0) return T(0);
  return static_cast<T>(exact_positive_sum / static_cast<double>(positive_count));
}

/// Checks that the dataset matches the shape the bank was generated for.
void check_transform_shapes(const Dataset& dataset, const KernelBank& bank);

/// Serial, straightforward transform: every instance against every kernel via
/// apply_kernel. This is the correctness reference for the parallel engine.
FeatureMatrix transform_reference(const Dataset& dataset, const KernelBank& bank, bool include_mpv,
                                  Precision precision);

/// Dataset values converted to T, same layout.
template <typename T>
std::vector<T> convert_values(std::span<const double> values);

extern template class PreparedBank<float>;
extern template class PreparedBank<double>;

}  // namespace rocketgrid

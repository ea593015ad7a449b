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
#include <vector>

#include "rocketgrid/rng.hpp"

namespace rocketgrid {

struct GenOptions {
  bool center_weights = true;
  /// Recorded in the bank so a transform can default to emitting MPV.
  bool include_mpv = false;
  std::uint64_t seed = 0;

  bool operator==(const GenOptions&) const = default;
};

/// Read-only view of one kernel inside a KernelBank. Weights are laid out
/// channel-major: weights[c * length + j] is tap j of the c-th selected channel.
struct KernelView {
  int length = 0;
  double bias = 0.0;
  int dilation = 1;
  int padding = 0;
  std::span<const double> weights;
  std::span<const int> channels;  // ascending, distinct
};

/// Columnar store of random convolution kernels generated for a fixed series
/// length and channel count.
class KernelBank {
 public:
  KernelBank() = default;

  std::size_t size() const noexcept { return lengths_.size(); }
  bool empty() const noexcept { return lengths_.empty(); }
  std::size_t l_series() const noexcept { return l_series_; }
  std::size_t n_channels() const noexcept { return n_channels_; }
  const GenOptions& options() const noexcept { return options_; }
  std::uint64_t seed() const noexcept { return options_.seed; }

  KernelView kernel(std::size_t k) const;

  std::span<const int> lengths() const noexcept { return lengths_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> biases() const noexcept { return biases_; }
  std::span<const int> dilations() const noexcept { return dilations_; }
  std::span<const int> paddings() const noexcept { return paddings_; }
  std::span<const int> channel_counts() const noexcept { return channel_counts_; }
  std::span<const int> channel_indices() const noexcept { return channel_indices_; }

  /// Largest number of taps (length x channels) over all kernels.
  std::size_t max_taps() const noexcept;

  /// Appends one kernel. `weights.size()` must equal length * channels.size().
  /// Throws InvalidInput when the kernel breaks a bank invariant.
  void push_back(int length, std::span<const double> weights, double bias, int dilation,
                 int padding, std::span<const int> channels);

  /// Empty bank for the given shape; kernels are added with push_back.
  static KernelBank with_shape(std::size_t l_series, std::size_t n_channels, GenOptions options);

  bool operator==(const KernelBank&) const = default;

  /// Versioned little-endian binary format ("RGKB").
  void save(std::ostream& out) const;
  static KernelBank load(std::istream& in);
  void save_file(const std::string& path) const;
  static KernelBank load_file(const std::string& path);

  /// Human-readable JSON dump, one object per kernel.
  std::string to_json() const;

 private:
  std::size_t l_series_ = 0;
  std::size_t n_channels_ = 0;
  GenOptions options_;

  std::vector<int> lengths_;
  std::vector<double> weights_;
  std::vector<double> biases_;
  std::vector<int> dilations_;
  std::vector<int> paddings_;
  std::vector<int> channel_counts_;
  std::vector<int> channel_indices_;

  // Prefix offsets into weights_ and channel_indices_, size() + 1 entries.
  std::vector<std::size_t> weight_offsets_{0};
  std::vector<std::size_t> channel_offsets_{0};
};

inline constexpr int kKernelLengths[] = {7, 9, 11};

/// log2((l_series - 1) / (l_kernel - 1)). Throws InvalidInput if l_series < l_kernel.
double dilation_exponent_bound(std::size_t l_series, int l_kernel);

/// Largest dilation that keeps an unpadded kernel inside the series:
/// floor((l_series - 1) / (l_kernel - 1)).
int max_dilation(std::size_t l_series, int l_kernel);

/// floor(2^x), never below 1.
int dilation_from_exponent(double x);

/// Draws x ~ U(0, A) and returns floor(2^x).
int sample_dilation(SplitMix64& rng, double exponent_bound);

/// Padding that centres the kernel on every time point: (l_kernel - 1) * d / 2.
int centered_padding(int l_kernel, int dilation);

/// Centred padding with probability 0.5, otherwise 0.
int sample_padding(SplitMix64& rng, int l_kernel, int dilation);

/// floor(2^u) clamped to [1, n_channels].
int channel_count_from_exponent(double u, std::size_t n_channels);

/// Random channel subset: count = floor(2^u), u ~ U(0, log2 n_channels), then
/// `count` distinct indices drawn uniformly and returned in ascending order.
std::vector<int> sample_channels(SplitMix64& rng, std::size_t n_channels);

/// Generates `count` kernels for series of length l_series (>= 11).
///
/// Per kernel, draws happen in a fixed order that is part of the bank format:
/// length, channel subset (only when n_channels > 1), weights, bias,
/// dilation, padding.
KernelBank generate_bank(std::size_t l_series, std::size_t n_channels, std::size_t count,
                         const GenOptions& options);

}  // namespace rocketgrid

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

#include "rocketgrid/kernelgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "rocketgrid/binary_io.hpp"
#include "rocketgrid/error.hpp"

namespace rocketgrid {

namespace {

constexpr char kBankMagic[5] = "RGKB";
constexpr std::uint32_t kBankVersion = 1;

}  // namespace

KernelView KernelBank::kernel(std::size_t k) const {
  const std::size_t w0 = weight_offsets_[k];
  const std::size_t c0 = channel_offsets_[k];
  return KernelView{
      .length = lengths_[k],
      .bias = biases_[k],
      .dilation = dilations_[k],
      .padding = paddings_[k],
      .weights = std::span<const double>(weights_).subspan(w0, weight_offsets_[k + 1] - w0),
      .channels = std::span<const int>(channel_indices_).subspan(c0, channel_offsets_[k + 1] - c0),
  };
}

std::size_t KernelBank::max_taps() const noexcept {
  std::size_t taps = 0;
  for (std::size_t k = 0; k < size(); ++k) {
    taps = std::max(taps, weight_offsets_[k + 1] - weight_offsets_[k]);
  }
  return taps;
}

KernelBank KernelBank::with_shape(std::size_t l_series, std::size_t n_channels,
                                  GenOptions options) {
  if (l_series == 0 || n_channels == 0) {
    throw InvalidInput("kernel bank needs a positive series length and channel count");
  }
  KernelBank bank;
  bank.l_series_ = l_series;
  bank.n_channels_ = n_channels;
  bank.options_ = options;
  return bank;
}

void KernelBank::push_back(int length, std::span<const double> weights, double bias,
                           int dilation, int padding, std::span<const int> channels) {
  if (length < 1) throw InvalidInput("kernel length must be positive");
  if (dilation < 1) throw InvalidInput("kernel dilation must be positive");
  if (padding < 0) throw InvalidInput("kernel padding must be non-negative");
  if (!std::isfinite(bias)) throw InvalidInput("kernel bias must be finite");
  if (channels.empty() || channels.size() > n_channels_) {
    throw InvalidInput("kernel channel count must lie in [1, n_channels]");
  }
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] < 0 || static_cast<std::size_t>(channels[i]) >= n_channels_) {
      throw InvalidInput("kernel channel index out of range");
    }
    if (i > 0 && channels[i] <= channels[i - 1]) {
      throw InvalidInput("kernel channel indices must be distinct and ascending");
    }
  }
  if (weights.size() != static_cast<std::size_t>(length) * channels.size()) {
    throw InvalidInput("kernel weight count must equal length * channel count");
  }
  if (!std::all_of(weights.begin(), weights.end(), [](double w) { return std::isfinite(w); })) {
    throw InvalidInput("kernel weights must be finite");
  }
  const std::size_t span = static_cast<std::size_t>(length - 1) * static_cast<std::size_t>(dilation);
  if (l_series_ + 2 * static_cast<std::size_t>(padding) < span + 1) {
    throw InvalidInput("kernel does not fit the series at any position");
  }

  lengths_.push_back(length);
  weights_.insert(weights_.end(), weights.begin(), weights.end());
  biases_.push_back(bias);
  dilations_.push_back(dilation);
  paddings_.push_back(padding);
  channel_counts_.push_back(static_cast<int>(channels.size()));
  channel_indices_.insert(channel_indices_.end(), channels.begin(), channels.end());
  weight_offsets_.push_back(weights_.size());
  channel_offsets_.push_back(channel_indices_.size());
}

void KernelBank::save(std::ostream& out) const {
  using namespace binio;
  write_header(out, kBankMagic, kBankVersion);
  write<std::uint64_t>(out, size());
  write<std::uint64_t>(out, l_series_);
  write<std::uint64_t>(out, n_channels_);
  write<std::uint64_t>(out, options_.seed);
  write<std::uint8_t>(out, options_.center_weights ? 1 : 0);
  write<std::uint8_t>(out, options_.include_mpv ? 1 : 0);
  write_array<std::int32_t>(out, lengths_);
  write<std::uint64_t>(out, weights_.size());
  write_array<double>(out, weights_);
  write_array<double>(out, biases_);
  write_array<std::int32_t>(out, dilations_);
  write_array<std::int32_t>(out, paddings_);
  write_array<std::int32_t>(out, channel_counts_);
  write<std::uint64_t>(out, channel_indices_.size());
  write_array<std::int32_t>(out, channel_indices_);
  if (!out) throw std::runtime_error("failed writing kernel bank");
}

KernelBank KernelBank::load(std::istream& in) {
  using namespace binio;
  read_header(in, kBankMagic, kBankVersion);
  const auto count = read<std::uint64_t>(in);
  const auto l_series = read<std::uint64_t>(in);
  const auto n_channels = read<std::uint64_t>(in);
  GenOptions options;
  options.seed = read<std::uint64_t>(in);
  options.center_weights = read<std::uint8_t>(in) != 0;
  options.include_mpv = read<std::uint8_t>(in) != 0;

  const auto lengths = read_array<std::int32_t, int>(in, count);
  const auto n_weights = read<std::uint64_t>(in);
  const auto weights = read_array<double>(in, n_weights);
  const auto biases = read_array<double>(in, count);
  const auto dilations = read_array<std::int32_t, int>(in, count);
  const auto paddings = read_array<std::int32_t, int>(in, count);
  const auto channel_counts = read_array<std::int32_t, int>(in, count);
  const auto n_indices = read<std::uint64_t>(in);
  const auto indices = read_array<std::int32_t, int>(in, n_indices);

  KernelBank bank;
  try {
    bank = with_shape(l_series, n_channels, options);
    std::size_t w = 0;
    std::size_t c = 0;
    for (std::size_t k = 0; k < count; ++k) {
      const auto n_ch = static_cast<std::size_t>(std::max(channel_counts[k], 0));
      const auto n_w = static_cast<std::size_t>(std::max(lengths[k], 0)) * n_ch;
      if (c + n_ch > indices.size() || w + n_w > weights.size()) {
        throw ParseError("kernel bank arrays are inconsistent");
      }
      bank.push_back(lengths[k], std::span(weights).subspan(w, n_w), biases[k], dilations[k],
                     paddings[k], std::span(indices).subspan(c, n_ch));
      w += n_w;
      c += n_ch;
    }
    if (w != weights.size() || c != indices.size()) {
      throw ParseError("kernel bank arrays are inconsistent");
    }
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("invalid kernel bank: ") + e.what());
  }
  return bank;
}

void KernelBank::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save(out);
}

KernelBank KernelBank::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load(in);
}

std::string KernelBank::to_json() const {
  nlohmann::json doc;
  doc["format"] = "rocketgrid.kernel_bank";
  doc["version"] = kBankVersion;
  doc["l_series"] = l_series_;
  doc["n_channels"] = n_channels_;
  doc["seed"] = options_.seed;
  doc["center_weights"] = options_.center_weights;
  doc["include_mpv"] = options_.include_mpv;
  auto& kernels = doc["kernels"] = nlohmann::json::array();
  for (std::size_t k = 0; k < size(); ++k) {
    const KernelView kv = kernel(k);
    kernels.push_back({
        {"length", kv.length},
        {"bias", kv.bias},
        {"dilation", kv.dilation},
        {"padding", kv.padding},
        {"channels", std::vector<int>(kv.channels.begin(), kv.channels.end())},
        {"weights", std::vector<double>(kv.weights.begin(), kv.weights.end())},
    });
  }
  return doc.dump(2);
}

double dilation_exponent_bound(std::size_t l_series, int l_kernel) {
  if (l_kernel < 2) throw InvalidInput("kernel length must be at least 2");
  if (l_series < static_cast<std::size_t>(l_kernel)) {
    throw InvalidInput("series of length " + std::to_string(l_series) +
                       " cannot hold a kernel of length " + std::to_string(l_kernel));
  }
  return std::log2(static_cast<double>(l_series - 1) / static_cast<double>(l_kernel - 1));
}

int max_dilation(std::size_t l_series, int l_kernel) {
  if (l_kernel < 2) return 1;
  return static_cast<int>((l_series - 1) / static_cast<std::size_t>(l_kernel - 1));
}

int dilation_from_exponent(double x) {
  return std::max(1, static_cast<int>(std::floor(std::exp2(x))));
}

int sample_dilation(SplitMix64& rng, double exponent_bound) {
  return dilation_from_exponent(rng.uniform(0.0, exponent_bound));
}

int centered_padding(int l_kernel, int dilation) { return (l_kernel - 1) * dilation / 2; }

int sample_padding(SplitMix64& rng, int l_kernel, int dilation) {
  return rng.uniform01() < 0.5 ? centered_padding(l_kernel, dilation) : 0;
}

int channel_count_from_exponent(double u, std::size_t n_channels) {
  const int count = static_cast<int>(std::floor(std::exp2(u)));
  return std::clamp(count, 1, static_cast<int>(n_channels));
}

std::vector<int> sample_channels(SplitMix64& rng, std::size_t n_channels) {
  const double u = rng.uniform(0.0, std::log2(static_cast<double>(n_channels)));
  const auto count = static_cast<std::size_t>(channel_count_from_exponent(u, n_channels));
  // Partial Fisher-Yates: the first `count` slots become a uniform subset.
  std::vector<int> pool(n_channels);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n_channels - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

KernelBank generate_bank(std::size_t l_series, std::size_t n_channels, std::size_t count,
                         const GenOptions& options) {
  if (l_series < 11) {
    throw InvalidInput("series length must be at least 11 to hold every kernel length");
  }
  if (n_channels == 0) throw InvalidInput("channel count must be positive");
  if (count == 0) throw InvalidInput("kernel count must be positive");

  KernelBank bank = KernelBank::with_shape(l_series, n_channels, options);
  SplitMix64 rng(options.seed);
  std::vector<double> weights;
  const std::vector<int> univariate{0};

  for (std::size_t k = 0; k < count; ++k) {
    const int length = kKernelLengths[rng.below(std::size(kKernelLengths))];
    const std::vector<int> channels = n_channels > 1 ? sample_channels(rng, n_channels) : univariate;

    weights.resize(static_cast<std::size_t>(length) * channels.size());
    for (double& w : weights) w = rng.normal();
    if (options.center_weights) {
      const double mean = std::accumulate(weights.begin(), weights.end(), 0.0) /
                          static_cast<double>(weights.size());
      for (double& w : weights) w -= mean;
    }

    const double bias = rng.uniform(-1.0, 1.0);
    const double bound = dilation_exponent_bound(l_series, length);
    const int dilation = std::min(sample_dilation(rng, bound), max_dilation(l_series, length));
    const int padding = sample_padding(rng, length, dilation);

    bank.push_back(length, weights, bias, dilation, padding, channels);
  }
  return bank;
}

}  // namespace rocketgrid

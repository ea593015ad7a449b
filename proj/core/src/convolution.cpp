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

#include "rocketgrid/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rocketgrid/error.hpp"
#include "rocketgrid/exact_sum.hpp"

namespace rocketgrid {

template <typename T>
PreparedBank<T>::PreparedBank(const KernelBank& bank) {
  lengths_.assign(bank.lengths().begin(), bank.lengths().end());
  dilations_.assign(bank.dilations().begin(), bank.dilations().end());
  paddings_.assign(bank.paddings().begin(), bank.paddings().end());
  channels_.assign(bank.channel_indices().begin(), bank.channel_indices().end());
  weights_.reserve(bank.weights().size());
  for (const double w : bank.weights()) weights_.push_back(static_cast<T>(w));
  biases_.reserve(bank.size());
  for (const double b : bank.biases()) biases_.push_back(static_cast<T>(b));

  weight_offsets_.assign(1, 0);
  channel_offsets_.assign(1, 0);
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const auto n_ch = static_cast<std::size_t>(bank.channel_counts()[k]);
    channel_offsets_.push_back(channel_offsets_.back() + n_ch);
    weight_offsets_.push_back(weight_offsets_.back() + n_ch * static_cast<std::size_t>(lengths_[k]));
  }
}

template <typename T>
KernelParams<T> PreparedBank<T>::operator[](std::size_t k) const {
  const std::size_t w0 = weight_offsets_[k];
  const std::size_t c0 = channel_offsets_[k];
  return KernelParams<T>{
      .length = lengths_[k],
      .bias = biases_[k],
      .dilation = dilations_[k],
      .padding = paddings_[k],
      .weights = std::span<const T>(weights_).subspan(w0, weight_offsets_[k + 1] - w0),
      .channels = std::span<const int>(channels_).subspan(c0, channel_offsets_[k + 1] - c0),
  };
}

template class PreparedBank<float>;
template class PreparedBank<double>;

std::size_t output_length(std::size_t l_series, int l_kernel, int dilation, int padding) {
  if (l_kernel < 1 || dilation < 1 || padding < 0) {
    throw InvalidInput("kernel length and dilation must be positive, padding non-negative");
  }
  const std::size_t span = static_cast<std::size_t>(l_kernel - 1) * static_cast<std::size_t>(dilation);
  const std::size_t padded = l_series + 2 * static_cast<std::size_t>(padding);
  if (padded < span + 1) {
    throw InvalidInput("kernel spanning " + std::to_string(span + 1) +
                       " points does not fit a padded series of length " + std::to_string(padded));
  }
  return padded - span;
}

template <typename T>
T dot_at(const SeriesView<T>& series, const KernelParams<T>& kernel, std::size_t position) {
  const auto n = static_cast<std::ptrdiff_t>(series.l_series);
  const auto origin = static_cast<std::ptrdiff_t>(position) - kernel.padding;
  T acc = 0;
  for (std::size_t c = 0; c < kernel.channels.size(); ++c) {
    const auto x = series.channel(static_cast<std::size_t>(kernel.channels[c]));
    const auto w = kernel.weights.subspan(c * static_cast<std::size_t>(kernel.length),
                                          static_cast<std::size_t>(kernel.length));
    for (int j = 0; j < kernel.length; ++j) {
      const std::ptrdiff_t idx = origin + static_cast<std::ptrdiff_t>(j) * kernel.dilation;
      if (idx >= 0 && idx < n) acc += w[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(idx)];
    }
  }
  return acc + kernel.bias;
}

template <typename T>
FeatureTriple apply_kernel(const SeriesView<T>& series, const KernelParams<T>& kernel,
                           bool include_mpv) {
  if (!std::all_of(series.values.begin(), series.values.end(), [](T v) { return std::isfinite(v); })) {
    throw InvalidInput("series contains non-finite values");
  }
  const std::size_t l_out = output_length(series.l_series, kernel.length, kernel.dilation, kernel.padding);
  std::size_t positives = 0;
  T running_max = -std::numeric_limits<T>::infinity();
  ExactSum positive_sum;
  for (std::size_t t = 0; t < l_out; ++t) {
    const T v = dot_at(series, kernel, t);
    if (v > T(0)) {
      ++positives;
      if (include_mpv) positive_sum.add(static_cast<double>(v));
    }
    running_max = std::max(running_max, v);
  }
  FeatureTriple out;
  out.ppv = static_cast<double>(finalize_ppv<T>(positives, l_out));
  out.max = static_cast<double>(running_max);
  out.mpv = include_mpv ? static_cast<double>(finalize_mpv<T>(positive_sum.value(), positives)) : 0.0;
  return out;
}

template float dot_at(const SeriesView<float>&, const KernelParams<float>&, std::size_t);
template double dot_at(const SeriesView<double>&, const KernelParams<double>&, std::size_t);
template FeatureTriple apply_kernel(const SeriesView<float>&, const KernelParams<float>&, bool);
template FeatureTriple apply_kernel(const SeriesView<double>&, const KernelParams<double>&, bool);

template <typename T>
std::vector<T> convert_values(std::span<const double> values) {
  std::vector<T> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](double v) { return static_cast<T>(v); });
  return out;
}

template std::vector<float> convert_values(std::span<const double>);
template std::vector<double> convert_values(std::span<const double>);

void check_transform_shapes(const Dataset& dataset, const KernelBank& bank) {
  if (dataset.n_instances() == 0) return;
  if (dataset.n_channels() != bank.n_channels()) {
    throw InvalidInput("dataset has " + std::to_string(dataset.n_channels()) +
                       " channels but the kernel bank was generated for " +
                       std::to_string(bank.n_channels()));
  }
  if (dataset.l_series() != bank.l_series()) {
    throw InvalidInput("dataset series length " + std::to_string(dataset.l_series()) +
                       " differs from the kernel bank's " + std::to_string(bank.l_series()));
  }
}

namespace {

template <typename T>
FeatureMatrix reference_impl(const Dataset& dataset, const KernelBank& bank, bool include_mpv,
                             Precision precision) {
  const std::size_t fpk = include_mpv ? 3 : 2;
  FeatureMatrix out(dataset.n_instances(), bank.size(), fpk, precision);
  const PreparedBank<T> kernels(bank);
  const std::vector<T> values = convert_values<T>(dataset.values());
  const std::size_t stride = dataset.values_per_instance();
  for (std::size_t i = 0; i < dataset.n_instances(); ++i) {
    const SeriesView<T> series{std::span<const T>(values).subspan(i * stride, stride),
                               dataset.n_channels(), dataset.l_series()};
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      const FeatureTriple f = apply_kernel(series, kernels[k], include_mpv);
      out.at(i, k * fpk) = f.ppv;
      out.at(i, k * fpk + 1) = f.max;
      if (include_mpv) out.at(i, k * fpk + 2) = f.mpv;
    }
  }
  return out;
}

}  // namespace

FeatureMatrix transform_reference(const Dataset& dataset, const KernelBank& bank, bool include_mpv,
                                  Precision precision) {
  check_transform_shapes(dataset, bank);
  return precision == Precision::kSingle ? reference_impl<float>(dataset, bank, include_mpv, precision)
                                         : reference_impl<double>(dataset, bank, include_mpv, precision);
}

}  // namespace rocketgrid

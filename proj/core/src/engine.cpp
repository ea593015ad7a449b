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

#include "rocketgrid/engine.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <thread>

#include "rocketgrid/convolution.hpp"
#include "rocketgrid/error.hpp"
#include "rocketgrid/exact_sum.hpp"

namespace rocketgrid {

template class CellAccumulator<float>;
template class CellAccumulator<double>;

namespace {

// Workers are folded in groups of this size before touching the shared cell
// accumulator, the way a warp reduces in registers before one atomic.
constexpr std::size_t kWarpSize = 32;
// Blocks claimed per trip to the shared block counter.
constexpr std::size_t kBlockChunk = 8;

std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// One kernel's geometry for a fixed series length, in working precision.
template <typename T>
struct Kernel {
  KernelParams<T> params;
  std::size_t l_out = 0;
};

// Response at output position t, with the same operation sequence as dot_at
// but with the in-range tap window computed up front.
template <typename T>
inline T response(const T* series, std::ptrdiff_t n, const KernelParams<T>& k, std::ptrdiff_t t) {
  const std::ptrdiff_t origin = t - k.padding;
  const std::ptrdiff_t d = k.dilation;
  const std::ptrdiff_t len = k.length;
  std::ptrdiff_t j_lo = 0;
  std::ptrdiff_t j_hi = len - 1;
  // Interior positions (the common case) need no division.
  if (origin < 0 || origin + j_hi * d > n - 1) {
    if (origin < 0) j_lo = (-origin + d - 1) / d;
    if (origin > n - 1) {
      j_hi = -1;
    } else if (origin + j_hi * d > n - 1) {
      j_hi = (n - 1 - origin) / d;
    }
  }

  T acc = 0;
  const T* w = k.weights.data();
  for (const int c : k.channels) {
    const T* x = series + static_cast<std::ptrdiff_t>(c) * n;
    std::ptrdiff_t idx = origin + j_lo * d;
    for (std::ptrdiff_t j = j_lo; j <= j_hi; ++j, idx += d) acc += w[j] * x[idx];
    w += len;
  }
  return acc + k.bias;
}

template <typename T>
class GridRunner {
 public:
  GridRunner(const Dataset& dataset, const KernelBank& bank, const EngineOptions& options)
      : dataset_(dataset), prepared_(bank), options_(options) {
    kernels_.reserve(bank.size());
    for (std::size_t k = 0; k < bank.size(); ++k) {
      const KernelParams<T> p = prepared_[k];
      kernels_.push_back({p, output_length(dataset.l_series(), p.length, p.dilation, p.padding)});
    }
  }

  // Transforms instances [range.start, range.start + range.count) into
  // out rows [0, range.count).
  void run(const InstanceRange& range, FeatureMatrix& out, TransformStats& stats) {
    const std::size_t bpi = bytes_per_instance(dataset_.n_channels(), dataset_.l_series(),
                                               options_.precision);
    const EnginePlan plan = plan_batches(range.count, bpi, options_.limits);
    const std::size_t stride = dataset_.values_per_instance();
    std::size_t largest = 0;
    for (const InstanceRange& batch : plan.batches) largest = std::max(largest, batch.count);
    staging_.resize(largest * stride);

    for (const InstanceRange& batch : plan.batches) {
      const auto src = dataset_.values().begin() +
                       static_cast<std::ptrdiff_t>((range.start + batch.start) * stride);
      std::transform(src, src + static_cast<std::ptrdiff_t>(batch.count * stride), staging_.begin(),
                     [](double v) { return static_cast<T>(v); });
      launch(batch, out, stats);
      ++stats.batches;
    }
  }

 private:
  void launch(const InstanceRange& batch, FeatureMatrix& out, TransformStats& stats) {
    const std::size_t n_blocks = batch.count * kernels_.size();
    std::atomic<std::size_t> next_block{0};
    std::atomic<std::uint64_t> dots{0};
    const auto worker = [&] {
      std::uint64_t local_dots = 0;
      while (true) {
        const std::size_t first = next_block.fetch_add(kBlockChunk, std::memory_order_relaxed);
        if (first >= n_blocks) break;
        const std::size_t last = std::min(n_blocks, first + kBlockChunk);
        for (std::size_t b = first; b < last; ++b) local_dots += run_block(b, batch.start, out);
      }
      dots.fetch_add(local_dots, std::memory_order_relaxed);
    };

    const std::size_t n_threads =
        std::min(resolve_threads(options_.threads), std::max<std::size_t>(1, n_blocks / kBlockChunk));
    if (n_threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(n_threads);
      for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    stats.dot_products += dots.load();
    stats.blocks += n_blocks;
  }

  // Block b covers kernel b % n_kernels (grid x) and batch row b / n_kernels
  // (grid y). Its accumulator lives only for the block, like a block's shared
  // memory; the finished features go straight to the output row.
  std::uint64_t run_block(std::size_t b, std::size_t first_row, FeatureMatrix& out) const {
    const std::size_t n_kernels = kernels_.size();
    const std::size_t k = b % n_kernels;
    const std::size_t row = b / n_kernels;
    const Kernel<T>& kernel = kernels_[k];
    const T* series = staging_.data() + row * dataset_.values_per_instance();
    const auto n = static_cast<std::ptrdiff_t>(dataset_.l_series());
    const std::size_t l_out = kernel.l_out;
    const std::size_t stride = options_.limits.workers_per_cell;
    const std::size_t workers = std::min(stride, l_out);
    const bool mpv = options_.include_mpv;

    CellAccumulator<T> cell;
    std::optional<AtomicExactSum> cell_sum;
    if (mpv) cell_sum.emplace();

    ExactSum warp_sum;  // reset per warp, and only when mpv is on
    for (std::size_t warp = 0; warp < workers; warp += kWarpSize) {
      std::uint64_t positives = 0;
      T warp_max = -std::numeric_limits<T>::infinity();
      const std::size_t lanes = std::min(workers, warp + kWarpSize) - warp;
      // Lane w of this warp owns positions warp + w, warp + w + stride, ...;
      // sweeping them stride by stride visits the same set in runs of
      // adjacent positions. Counts, max and exact sums ignore the order.
      for (std::size_t base = warp; base < l_out; base += stride) {
        const std::size_t end = std::min(l_out, base + lanes);
        for (std::size_t t = base; t < end; ++t) {
          const T v = response(series, n, kernel.params, static_cast<std::ptrdiff_t>(t));
          positives += v > T(0);
          if (mpv && v > T(0)) warp_sum.add(static_cast<double>(v));
          warp_max = std::max(warp_max, v);
        }
      }
      cell.merge(positives, warp_max);
      if (mpv) {
        cell_sum->merge(warp_sum);
        warp_sum = ExactSum{};
      }
    }

    const std::size_t fpk = out.features_per_kernel();
    double* dst = out.row(first_row + row).data() + k * fpk;
    const std::uint64_t count = cell.ppv_count();
    dst[0] = static_cast<double>(finalize_ppv<T>(count, l_out));
    dst[1] = static_cast<double>(cell.running_max());
    if (mpv) dst[2] = static_cast<double>(finalize_mpv<T>(cell_sum->snapshot().value(), count));
    return l_out;
  }

  const Dataset& dataset_;
  PreparedBank<T> prepared_;
  EngineOptions options_;
  std::vector<Kernel<T>> kernels_;
  std::vector<T> staging_;
};

void validate_options(const KernelBank& bank, const EngineOptions& options) {
  const GridLimits& lim = options.limits;
  if (lim.max_x == 0 || lim.max_y == 0 || lim.workers_per_cell == 0 || lim.memory_budget_bytes == 0) {
    throw InvalidInput("grid limits must all be positive");
  }
  if (bank.size() > lim.max_x) {
    throw CapacityError(std::to_string(bank.size()) + " kernels exceed the grid x limit of " +
                        std::to_string(lim.max_x));
  }
}

template <typename T>
FeatureMatrix transform_range(const Dataset& dataset, const KernelBank& bank,
                              const EngineOptions& options, const InstanceRange& range,
                              TransformStats& stats) {
  FeatureMatrix out(range.count, bank.size(), options.include_mpv ? 3 : 2, options.precision);
  if (range.count == 0 || bank.empty()) return out;
  GridRunner<T> runner(dataset, bank, options);
  runner.run(range, out, stats);
  return out;
}

FeatureMatrix dispatch(const Dataset& dataset, const KernelBank& bank, const EngineOptions& options,
                       const InstanceRange& range, TransformStats& stats) {
  return options.precision == Precision::kSingle
             ? transform_range<float>(dataset, bank, options, range, stats)
             : transform_range<double>(dataset, bank, options, range, stats);
}

}  // namespace

std::size_t bytes_per_instance(std::size_t n_channels, std::size_t l_series, Precision precision) {
  const std::size_t width = precision == Precision::kSingle ? sizeof(float) : sizeof(double);
  return n_channels * l_series * width;
}

EnginePlan plan_batches(std::size_t n_instances, std::size_t bytes_per_instance,
                        const GridLimits& limits) {
  if (bytes_per_instance == 0) throw InvalidInput("bytes per instance must be positive");
  if (limits.max_y == 0) throw InvalidInput("grid y limit must be positive");
  if (limits.memory_budget_bytes < bytes_per_instance) {
    throw CapacityError("one instance needs " + std::to_string(bytes_per_instance) +
                        " bytes but the memory budget is " +
                        std::to_string(limits.memory_budget_bytes));
  }
  EnginePlan plan;
  plan.bytes_per_instance = bytes_per_instance;
  plan.batch_size = std::min(limits.max_y, limits.memory_budget_bytes / bytes_per_instance);
  for (std::size_t start = 0; start < n_instances; start += plan.batch_size) {
    plan.batches.push_back({start, std::min(plan.batch_size, n_instances - start)});
  }
  plan.shards.push_back({0, n_instances});
  return plan;
}

std::vector<InstanceRange> plan_shards(std::size_t n_instances, std::size_t n_devices) {
  if (n_devices == 0) throw InvalidInput("device count must be positive");
  std::vector<InstanceRange> shards;
  shards.reserve(n_devices);
  const std::size_t base = n_instances / n_devices;
  const std::size_t extra = n_instances % n_devices;
  std::size_t start = 0;
  for (std::size_t d = 0; d < n_devices; ++d) {
    const std::size_t count = base + (d < extra ? 1 : 0);
    shards.push_back({start, count});
    start += count;
  }
  return shards;
}

CellAccumulator<double> reduce_cell(std::span<const CellUpdate> updates) {
  CellAccumulator<double> acc;
  for (const CellUpdate& u : updates) acc.update(u.is_positive, u.dot_value);
  return acc;
}

FeatureMatrix transform(const Dataset& dataset, const KernelBank& bank, const EngineOptions& options,
                        TransformStats* stats) {
  check_transform_shapes(dataset, bank);
  validate_options(bank, options);
  TransformStats local;
  FeatureMatrix out = dispatch(dataset, bank, options, {0, dataset.n_instances()}, local);
  local.shards = 1;
  if (stats) *stats = local;
  return out;
}

FeatureMatrix transform_sharded(const Dataset& dataset, const KernelBank& bank, std::size_t n_devices,
                                const EngineOptions& options, TransformStats* stats) {
  check_transform_shapes(dataset, bank);
  validate_options(bank, options);
  const std::vector<InstanceRange> shards = plan_shards(dataset.n_instances(), n_devices);

  EngineOptions per_device = options;
  per_device.threads = std::max<std::size_t>(1, resolve_threads(options.threads) / n_devices);

  std::vector<std::optional<FeatureMatrix>> parts(shards.size());
  std::vector<TransformStats> part_stats(shards.size());
  std::vector<std::exception_ptr> errors(shards.size());
  {
    std::vector<std::jthread> devices;
    for (std::size_t d = 0; d < shards.size(); ++d) {
      if (shards[d].count == 0) continue;
      devices.emplace_back([&, d] {
        try {
          parts[d] = dispatch(dataset, bank, per_device, shards[d], part_stats[d]);
        } catch (...) {
          errors[d] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  FeatureMatrix out(0, bank.size(), options.include_mpv ? 3 : 2, options.precision);
  TransformStats total;
  for (std::size_t d = 0; d < shards.size(); ++d) {
    if (!parts[d]) continue;
    out.append_rows(*parts[d]);
    total.dot_products += part_stats[d].dot_products;
    total.blocks += part_stats[d].blocks;
    total.batches += part_stats[d].batches;
    ++total.shards;
  }
  if (stats) *stats = total;
  return out;
}

}  // namespace rocketgrid

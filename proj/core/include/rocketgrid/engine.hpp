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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rocketgrid/data.hpp"
#include "rocketgrid/features.hpp"
#include "rocketgrid/kernelgen.hpp"

namespace rocketgrid {

/// Launch limits of the emulated device. Defaults match a CUDA grid:
/// (2^31 - 1) blocks along x, 65535 along y, up to 1024 threads per block.
struct GridLimits {
  std::size_t max_x = 2147483647;
  std::size_t max_y = 65535;
  std::size_t workers_per_cell = 1024;
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
};

struct InstanceRange {
  std::size_t start = 0;
  std::size_t count = 0;

  bool operator==(const InstanceRange&) const = default;
};

struct EnginePlan {
  std::vector<InstanceRange> batches;
  std::vector<InstanceRange> shards;
  std::size_t bytes_per_instance = 0;
  std::size_t batch_size = 0;
};

/// Staging size of one instance: n_channels * l_series * sizeof(working type).
std::size_t bytes_per_instance(std::size_t n_channels, std::size_t l_series, Precision precision);

/// Splits [0, n_instances) into consecutive batches of
/// min(max_y, memory_budget_bytes / bytes_per_instance) instances. The plan
/// has a single shard covering every instance. Throws CapacityError when one
/// instance exceeds the memory budget.
EnginePlan plan_batches(std::size_t n_instances, std::size_t bytes_per_instance,
                        const GridLimits& limits);

/// Near-equal contiguous partition into n_devices ranges (sizes differ by at
/// most one; leading shards take the remainder). Throws InvalidInput when
/// n_devices == 0.
std::vector<InstanceRange> plan_shards(std::size_t n_instances, std::size_t n_devices);

/// PPV counter and running maximum of one (kernel, instance) cell. Updates
/// are atomic and commutative, so any interleaving of workers gives the same
/// final state.
template <typename T>
class CellAccumulator {
 public:
  CellAccumulator() noexcept { reset(); }
  CellAccumulator(const CellAccumulator& other) noexcept
      : ppv_count_(other.ppv_count()), running_max_(other.running_max()) {}
  CellAccumulator& operator=(const CellAccumulator& other) noexcept {
    ppv_count_.store(other.ppv_count(), std::memory_order_relaxed);
    running_max_.store(other.running_max(), std::memory_order_relaxed);
    return *this;
  }

  void reset() noexcept {
    ppv_count_.store(0, std::memory_order_relaxed);
    running_max_.store(-std::numeric_limits<T>::infinity(), std::memory_order_relaxed);
  }

  void update(bool is_positive, T value) noexcept { merge(is_positive ? 1 : 0, value); }

  /// Folds in a partial result (positive count, maximum) from one worker group.
  void merge(std::uint64_t positives, T max_value) noexcept {
    if (positives != 0) ppv_count_.fetch_add(positives, std::memory_order_relaxed);
    T current = running_max_.load(std::memory_order_relaxed);
    while (max_value > current &&
           !running_max_.compare_exchange_weak(current, max_value, std::memory_order_relaxed)) {
    }
  }

  std::uint64_t ppv_count() const noexcept { return ppv_count_.load(std::memory_order_relaxed); }
  T running_max() const noexcept { return running_max_.load(std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> ppv_count_;
  std::atomic<T> running_max_;
};

struct CellUpdate {
  bool is_positive = false;
  double dot_value = 0.0;
};

/// Folds a list of updates into a fresh accumulator: (0, -inf) for no updates.
CellAccumulator<double> reduce_cell(std::span<const CellUpdate> updates);

struct EngineOptions {
  GridLimits limits;
  Precision precision = Precision::kSingle;
  bool include_mpv = false;
  /// OS threads per device; 0 means std::thread::hardware_concurrency().
  std::size_t threads = 0;
};

struct TransformStats {
  std::uint64_t dot_products = 0;
  std::uint64_t blocks = 0;
  std::size_t batches = 0;
  std::size_t shards = 0;
};

/// Parallel transform. Each batch stages its instances in working precision,
/// then launches a grid of blocks, x = kernel and y = instance. A block owns
/// one cell; its workers_per_cell workers take output positions w, w + W,
/// w + 2W, ... and fold their responses into the cell's accumulator. PPV is
/// divided by the number of positions once every worker has finished.
///
/// The result is bit-identical to transform_reference at the same precision,
/// for any limits and thread count.
FeatureMatrix transform(const Dataset& dataset, const KernelBank& bank, const EngineOptions& options,
                        TransformStats* stats = nullptr);

/// Splits the instances into n_devices shards, transforms each on its own
/// worker group concurrently, and concatenates the rows in instance order.
FeatureMatrix transform_sharded(const Dataset& dataset, const KernelBank& bank, std::size_t n_devices,
                                const EngineOptions& options, TransformStats* stats = nullptr);

extern template class CellAccumulator<float>;
extern template class CellAccumulator<double>;

}  // namespace rocketgrid

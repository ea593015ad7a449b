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

#include <array>
#include <atomic>
#include <cstdint>

namespace rocketgrid {

/// Exact accumulator for non-negative finite doubles (a small fixed-point
/// superaccumulator over the whole double range, 32 bits per digit).
/// Because the sum is exact, the result is independent of the order in which
/// values are added or partial sums merged. value() rounds the exact sum to
/// the nearest double, ties to even.
class ExactSum {
 public:
  static constexpr int kDigits = 68;

  void add(double v) noexcept;
  void merge(const ExactSum& other) noexcept;
  /// Carries every digit into [0, 2^32).
  void normalize() noexcept;
  double value() const noexcept;
  bool empty() const noexcept;

  std::int64_t digit(int i) const noexcept { return digits_[i]; }

 private:
  friend class AtomicExactSum;
  std::array<std::int64_t, kDigits> digits_{};
  std::uint32_t pending_ = 0;  // adds since the last normalize
};

/// ExactSum whose merge is safe under concurrent callers.
class AtomicExactSum {
 public:
  AtomicExactSum() noexcept { reset(); }

  void reset() noexcept;
  /// Normalizes `local` and adds it digit-wise with relaxed atomics.
  void merge(ExactSum local) noexcept;
  ExactSum snapshot() const noexcept;

 private:
  std::array<std::atomic<std::int64_t>, ExactSum::kDigits> digits_;
};

}  // namespace rocketgrid

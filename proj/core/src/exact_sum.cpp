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

#include "rocketgrid/exact_sum.hpp"

#include <bit>
#include <cmath>

namespace rocketgrid {

void ExactSum::add(double v) noexcept {
  if (!(v > 0.0)) return;
  const auto bits = std::bit_cast<std::uint64_t>(v);
  const auto biased = static_cast<int>((bits >> 52) & 0x7FF);
  std::uint64_t mant = bits & ((std::uint64_t{1} << 52) - 1);
  // v = mant * 2^(pos - 1074)
  int pos = 0;
  if (biased != 0) {
    mant |= std::uint64_t{1} << 52;
    pos = biased - 1;
  }
  const int digit = pos / 32;
  const auto wide = static_cast<unsigned __int128>(mant) << (pos % 32);
  digits_[digit] += static_cast<std::int64_t>(static_cast<std::uint32_t>(wide));
  digits_[digit + 1] += static_cast<std::int64_t>(static_cast<std::uint32_t>(wide >> 32));
  digits_[digit + 2] += static_cast<std::int64_t>(static_cast<std::uint32_t>(wide >> 64));
  if (++pending_ == (1u << 30)) normalize();
}

void ExactSum::merge(const ExactSum& other) noexcept {
  ExactSum rhs = other;
  rhs.normalize();
  normalize();
  for (int i = 0; i < kDigits; ++i) digits_[i] += rhs.digits_[i];
  pending_ = 2;
}

void ExactSum::normalize() noexcept {
  for (int i = 0; i + 1 < kDigits; ++i) {
    digits_[i + 1] += digits_[i] >> 32;
    digits_[i] &= 0xFFFFFFFF;
  }
  pending_ = 0;
}

bool ExactSum::empty() const noexcept {
  for (const auto d : digits_) {
    if (d != 0) return false;
  }
  return true;
}

double ExactSum::value() const noexcept {
  ExactSum n = *this;
  n.normalize();
  int top = kDigits - 1;
  while (top >= 0 && n.digits_[top] == 0) --top;
  if (top < 0) return 0.0;

  unsigned __int128 x = 0;
  for (int i = top; i > top - 4; --i) {
    x <<= 32;
    if (i >= 0) x |= static_cast<std::uint32_t>(n.digits_[i]);
  }
  bool sticky = false;
  for (int i = top - 4; i >= 0; --i) sticky = sticky || n.digits_[i] != 0;
  const int base_exp = 32 * (top - 3) - 1074;

  const int msb = 127 - (x >> 64 != 0 ? std::countl_zero(static_cast<std::uint64_t>(x >> 64))
                                       : 64 + std::countl_zero(static_cast<std::uint64_t>(x)));
  if (msb < 53) return std::ldexp(static_cast<double>(static_cast<std::uint64_t>(x)), base_exp);

  const int shift = msb - 52;
  auto m = static_cast<std::uint64_t>(x >> shift);
  const unsigned __int128 rem = x & ((static_cast<unsigned __int128>(1) << shift) - 1);
  const unsigned __int128 half = static_cast<unsigned __int128>(1) << (shift - 1);
  if (rem > half || (rem == half && (sticky || (m & 1) != 0))) ++m;
  return std::ldexp(static_cast<double>(m), base_exp + shift);
}

void AtomicExactSum::reset() noexcept {
  for (auto& d : digits_) d.store(0, std::memory_order_relaxed);
}

void AtomicExactSum::merge(ExactSum local) noexcept {
  local.normalize();
  for (int i = 0; i < ExactSum::kDigits; ++i) {
    if (local.digits_[i] != 0) digits_[i].fetch_add(local.digits_[i], std::memory_order_relaxed);
  }
}

ExactSum AtomicExactSum::snapshot() const noexcept {
  ExactSum s;
  for (int i = 0; i < ExactSum::kDigits; ++i) s.digits_[i] = digits_[i].load(std::memory_order_relaxed);
  s.pending_ = 1;
  return s;
}

}  // namespace rocketgrid

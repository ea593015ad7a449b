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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "oracle/naive_rocket.hpp"
#include "rocketgrid/exact_sum.hpp"
#include "rocketgrid/rng.hpp"

using namespace rocketgrid;

namespace {

std::vector<double> wild_values(std::uint64_t seed, std::size_t n) {
  SplitMix64 rng(seed);
  std::vector<double> v(n);
  for (double& x : v) {
    const int e = static_cast<int>(rng.below(80)) - 40;
    x = std::ldexp(rng.uniform01(), e);
  }
  return v;
}

double exact(const std::vector<double>& v) {
  ExactSum s;
  for (const double x : v) s.add(x);
  return s.value();
}

}  // namespace

TEST_CASE("empty and trivial sums") {
  ExactSum s;
  CHECK(s.empty());
  CHECK(s.value() == 0.0);
  CHECK_FALSE(std::signbit(s.value()));
  s.add(0.0);
  CHECK(s.value() == 0.0);
  s.add(1.5);
  CHECK_FALSE(s.empty());
  CHECK(s.value() == 1.5);
}

TEST_CASE("sums that naive addition gets wrong") {
  // 1 + 2^-53 + 2^-53 is exactly 1 + 2^-52
  CHECK(exact({1.0, 0x1p-53, 0x1p-53}) == 1.0 + 0x1p-52);
  CHECK(exact({0x1p-53, 0x1p-53, 1.0}) == 1.0 + 0x1p-52);
  // a tiny term breaks the tie upward
  CHECK(exact({1.0, 0x1p-53, 0x1p-1070}) == std::nextafter(1.0, 2.0));
  // exact tie rounds to even
  CHECK(exact({1.0, 0x1p-53}) == 1.0);
  CHECK(exact({1.0 + 0x1p-52, 0x1p-53}) == 1.0 + 0x1p-51);
  const double dmin = std::numeric_limits<double>::denorm_min();
  CHECK(exact({dmin, dmin, dmin}) == 3 * dmin);
  const double big = std::numeric_limits<double>::max();
  CHECK(exact({big / 4, big / 4}) == big / 2);
}

TEST_CASE("matches the Shewchuk oracle on random data") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto v = wild_values(seed, 1 + seed * 37);
    CHECK(exact(v) == oracle::fsum(v));
  }
}

TEST_CASE("result is independent of order and grouping") {
  auto v = wild_values(99, 5000);
  const double ref = exact(v);
  SplitMix64 rng(5);
  for (int round = 0; round < 5; ++round) {
    for (std::size_t i = v.size() - 1; i > 0; --i) std::swap(v[i], v[rng.below(i + 1)]);
    CHECK(exact(v) == ref);

    ExactSum a, b;
    AtomicExactSum shared;
    const std::size_t cut = rng.below(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) (i < cut ? a : b).add(v[i]);
    ExactSum merged = b;
    merged.merge(a);
    CHECK(merged.value() == ref);
    shared.merge(a);
    shared.merge(b);
    CHECK(shared.snapshot().value() == ref);
  }
}

TEST_CASE("many adds without explicit normalization stay exact") {
  ExactSum s;
  const double x = 0x1.fffffffffffffp+1000;
  for (int i = 0; i < 100000; ++i) s.add(x);
  CHECK(s.value() == x * 100000);
}

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

#include <cmath>
#include <limits>
#include <vector>

#include "oracle/naive_rocket.hpp"
#include "rocketgrid/convolution.hpp"
#include "rocketgrid/error.hpp"

using namespace rocketgrid;

namespace {

template <typename T>
SeriesView<T> view(const std::vector<T>& v, std::size_t channels = 1) {
  return SeriesView<T>{v, channels, v.size() / channels};
}

template <typename T>
KernelParams<T> params(const std::vector<T>& w, T bias, int dilation, int padding,
                       const std::vector<int>& channels, int length) {
  return KernelParams<T>{length, bias, dilation, padding, w, channels};
}

const std::vector<int> kCh0{0};

}  // namespace

TEST_CASE("output length counts valid positions") {
  CHECK(output_length(10, 3, 1, 0) == 8);
  CHECK(output_length(100, 7, 2, 6) == 100);
  CHECK(output_length(5, 1, 1, 0) == 5);
  CHECK(output_length(5, 5, 1, 0) == 1);
  CHECK_THROWS_AS(output_length(5, 6, 1, 0), InvalidInput);
  CHECK_THROWS_AS(output_length(5, 3, 3, 0), InvalidInput);
}

TEST_CASE_TEMPLATE("dot_at examples", T, float, double) {
  const std::vector<T> x{0, 1, 2, 3};
  const std::vector<T> w{1, -1};
  CHECK(dot_at(view(x), params<T>(w, 0, 1, 0, kCh0, 2), 0) == T(-1));

  const std::vector<T> ones{1, 1};
  const std::vector<T> w3{1, 1, 1};
  CHECK(dot_at(view(ones), params<T>(w3, 0, 1, 1, kCh0, 3), 0) == T(2));

  const std::vector<T> two_channels{1, 0, 0, 1};
  const std::vector<T> per_channel{1, 1};
  const std::vector<int> both{0, 1};
  CHECK(dot_at(view(two_channels, 2), params<T>(per_channel, 0, 1, 0, both, 1), 0) == T(1));
  CHECK(dot_at(view(two_channels, 2), params<T>(per_channel, 0, 1, 0, both, 1), 1) == T(1));
}

TEST_CASE("dot_at applies dilation and virtual padding") {
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7};
  const std::vector<double> w{1, 10, 100};
  // d = 2, p = 2: position 0 taps x[-2], x[0], x[2]
  const auto k = params<double>(w, 0.5, 2, 2, kCh0, 3);
  CHECK(dot_at(view(x), k, 0) == 0 + 10 * 1 + 100 * 3 + 0.5);
  CHECK(dot_at(view(x), k, 3) == 1 * 2 + 10 * 4 + 100 * 6 + 0.5);
  CHECK(dot_at(view(x), k, 6) == 1 * 5 + 10 * 7 + 0 + 0.5);
}

TEST_CASE_TEMPLATE("apply_kernel examples", T, float, double) {
  const std::vector<T> x{0, 1, 2, 3};
  const std::vector<T> w{1, -1};
  const FeatureTriple a = apply_kernel(view(x), params<T>(w, 0, 1, 0, kCh0, 2), true);
  CHECK(a.ppv == 0.0);
  CHECK(a.max == -1.0);
  CHECK(a.mpv == 0.0);

  const FeatureTriple b = apply_kernel(view(x), params<T>(w, 2, 1, 0, kCh0, 2), true);
  CHECK(b.ppv == 1.0);
  CHECK(b.max == 1.0);
  CHECK(b.mpv == 1.0);

  const std::vector<T> zeros(3, T(0));
  const std::vector<T> y{3, -2, 5, 0.5, 9};
  const FeatureTriple c = apply_kernel(view(y), params<T>(zeros, 0, 1, 1, kCh0, 3), true);
  CHECK(c.ppv == 0.0);
  CHECK(c.max == 0.0);
  CHECK(c.mpv == 0.0);
}

TEST_CASE("apply_kernel mixes positives and negatives") {
  const std::vector<double> x{1, -2, 3, -4, 5};
  const std::vector<double> w{1};
  // outputs 1.5, -1.5, 3.5, -3.5, 5.5
  const FeatureTriple f = apply_kernel(view(x), params<double>(w, 0.5, 1, 0, kCh0, 1), true);
  CHECK(f.ppv == 0.6);
  CHECK(f.max == 5.5);
  CHECK(f.mpv == doctest::Approx((1.5 + 3.5 + 5.5) / 3).epsilon(1e-15));
}

TEST_CASE("apply_kernel rejects non-finite input") {
  const std::vector<double> x{1, std::numeric_limits<double>::quiet_NaN(), 3};
  const std::vector<double> w{1};
  CHECK_THROWS_AS(apply_kernel(view(x), params<double>(w, 0, 1, 0, kCh0, 1), false), InvalidInput);
  const std::vector<float> y{1, std::numeric_limits<float>::infinity(), 3};
  const std::vector<float> wf{1};
  CHECK_THROWS_AS(apply_kernel(view(y), params<float>(wf, 0, 1, 0, kCh0, 1), false), InvalidInput);
}

TEST_CASE("reference transform on degenerate sizes") {
  GenOptions opt;
  opt.seed = 4;
  const KernelBank bank = generate_bank(30, 1, 1, opt);
  const Dataset one = synth_random(1, 1, 30, 9);
  const FeatureMatrix fm = transform_reference(one, bank, false, Precision::kDouble);
  REQUIRE(fm.rows() == 1);
  REQUIRE(fm.cols() == 2);
  const PreparedBank<double> prepared(bank);
  const FeatureTriple f = apply_kernel(one.instance(0), prepared[0], false);
  CHECK(fm.ppv(0, 0) == f.ppv);
  CHECK(fm.max(0, 0) == f.max);

  std::vector<double> values;
  for (int i = 0; i < 3; ++i) values.insert(values.end(), one.values().begin(), one.values().end());
  const Dataset same(std::string("same"), 3, 1, 30, values);
  const FeatureMatrix rows = transform_reference(same, generate_bank(30, 1, 12, opt), true, Precision::kSingle);
  for (std::size_t j = 0; j < rows.cols(); ++j) {
    CHECK(rows.at(0, j) == rows.at(1, j));
    CHECK(rows.at(0, j) == rows.at(2, j));
  }
}

TEST_CASE("reference transform matches the naive oracle exactly") {
  const Dataset ds = synth_random(10, 1, 50, 123);
  GenOptions opt;
  opt.seed = 321;
  const KernelBank bank = generate_bank(50, 1, 20, opt);
  for (const bool mpv : {false, true}) {
    const FeatureMatrix dbl = transform_reference(ds, bank, mpv, Precision::kDouble);
    CHECK(dbl.values() == oracle::transform<double>(ds, bank, mpv));
    const FeatureMatrix sgl = transform_reference(ds, bank, mpv, Precision::kSingle);
    CHECK(sgl.values() == oracle::transform<float>(ds, bank, mpv));
  }

  const Dataset multi = synth_random(6, 3, 40, 5);
  const KernelBank mbank = generate_bank(40, 3, 30, opt);
  CHECK(transform_reference(multi, mbank, true, Precision::kDouble).values() ==
        oracle::transform<double>(multi, mbank, true));
}

TEST_CASE("reference transform rejects shape mismatches") {
  const KernelBank bank = generate_bank(50, 1, 3, {});
  CHECK_THROWS_AS(transform_reference(synth_random(2, 1, 49, 1), bank, false, Precision::kDouble), InvalidInput);
  CHECK_THROWS_AS(transform_reference(synth_random(2, 2, 50, 1), bank, false, Precision::kDouble), InvalidInput);
}

TEST_CASE("bias shift moves max by the shift and never lowers ppv") {
  // Integer-valued series and weights keep every sum exact in double.
  std::vector<double> x(40);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(static_cast<int>(i * 7919 % 23) - 11);
  const std::vector<double> w{1, -2, 0, 3, -1, 2, -3};
  for (const double c : {0.25, 1.0, 3.5, 17.0}) {
    const auto base = apply_kernel(view(x), params<double>(w, -2.0, 2, 6, kCh0, 7), true);
    const auto shifted = apply_kernel(view(x), params<double>(w, -2.0 + c, 2, 6, kCh0, 7), true);
    CHECK(shifted.max == base.max + c);
    CHECK(shifted.ppv >= base.ppv);
  }

  // Random single-precision fixture: relative agreement.
  const Dataset ds = synth_random(5, 1, 64, 2);
  GenOptions opt;
  opt.seed = 10;
  const KernelBank bank = generate_bank(64, 1, 25, opt);
  const PreparedBank<float> pf(bank);
  const auto xs = convert_values<float>(ds.values());
  for (std::size_t i = 0; i < 5; ++i) {
    const SeriesView<float> s{std::span<const float>(xs).subspan(i * 64, 64), 1, 64};
    for (std::size_t k = 0; k < bank.size(); ++k) {
      KernelParams<float> kp = pf[k];
      const auto base = apply_kernel(s, kp, false);
      kp.bias += 0.5f;
      const auto shifted = apply_kernel(s, kp, false);
      CHECK(std::abs(shifted.max - (base.max + 0.5)) <= 1e-5 * std::max(1.0, std::abs(base.max + 0.5)));
      CHECK(shifted.ppv >= base.ppv);
    }
  }
}

TEST_CASE("power-of-two scaling with zero bias scales max and keeps ppv") {
  const Dataset ds = synth_random(4, 1, 60, 77);
  GenOptions opt;
  opt.seed = 13;
  const KernelBank bank = generate_bank(60, 1, 20, opt);
  const PreparedBank<double> pb(bank);
  for (const double s : {0.25, 2.0, 8.0}) {
    for (std::size_t i = 0; i < ds.n_instances(); ++i) {
      const auto orig = ds.instance(i).values;
      std::vector<double> scaled(orig.begin(), orig.end());
      for (double& v : scaled) v *= s;
      for (std::size_t k = 0; k < bank.size(); ++k) {
        KernelParams<double> kp = pb[k];
        kp.bias = 0.0;
        const auto a = apply_kernel(ds.instance(i), kp, true);
        const auto b = apply_kernel(view(scaled), kp, true);
        CHECK(b.max == a.max * s);
        CHECK(b.ppv == a.ppv);
        CHECK(b.mpv == a.mpv * s);
      }
    }
  }
}

TEST_CASE("feature invariants hold on random banks") {
  const Dataset ds = synth_random(8, 2, 90, 31);
  GenOptions opt;
  opt.seed = 17;
  const KernelBank bank = generate_bank(90, 2, 60, opt);
  const FeatureMatrix fm = transform_reference(ds, bank, true, Precision::kDouble);
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const KernelView kv = bank.kernel(k);
    const std::size_t l_out = output_length(90, kv.length, kv.dilation, kv.padding);
    if (kv.padding > 0) CHECK(l_out == 90);
    for (std::size_t i = 0; i < ds.n_instances(); ++i) {
      const double ppv = fm.ppv(i, k);
      CHECK(ppv >= 0.0);
      CHECK(ppv <= 1.0);
      const double scaled = ppv * static_cast<double>(l_out);
      CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
      CHECK(fm.mpv(i, k) >= 0.0);
      CHECK((fm.mpv(i, k) > 0.0) == (ppv > 0.0));
    }
  }
}

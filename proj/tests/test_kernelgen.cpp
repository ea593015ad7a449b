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
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rocketgrid/error.hpp"
#include "rocketgrid/kernelgen.hpp"

using namespace rocketgrid;

TEST_CASE("dilation exponent bound follows log2((l-1)/(k-1))") {
  CHECK(dilation_exponent_bound(7, 7) == 0.0);
  CHECK(dilation_exponent_bound(100, 7) == doctest::Approx(4.044394119358453).epsilon(1e-14));
  // log2(999/10); the commonly quoted 6.6427 is a rounding slip, the formula gives 6.64241.
  CHECK(dilation_exponent_bound(1000, 11) == doctest::Approx(6.642412772905056).epsilon(1e-14));
  CHECK_THROWS_AS(dilation_exponent_bound(6, 7), InvalidInput);
}

TEST_CASE("dilation bound keeps the kernel inside the series") {
  for (std::size_t l = 11; l < 3000; l += 7) {
    for (const int k : kKernelLengths) {
      const double a = dilation_exponent_bound(l, k);
      const int d = max_dilation(l, k);
      CHECK(static_cast<std::size_t>((k - 1) * d) <= l - 1);
      CHECK(d == static_cast<int>(std::floor(std::exp2(a) + 1e-9)));
    }
  }
}

TEST_CASE("dilation from exponent floors 2^x") {
  CHECK(dilation_from_exponent(0.0) == 1);
  CHECK(dilation_from_exponent(4.044394119358453) == 16);
  CHECK(6 * 16 <= 99);
  CHECK(dilation_from_exponent(3.2) == 9);
}

TEST_CASE("sampled dilations stay within [1, floor(2^A)]") {
  SplitMix64 rng(11);
  const double a = dilation_exponent_bound(100, 7);
  std::set<int> seen;
  for (int i = 0; i < 5000; ++i) {
    const int d = sample_dilation(rng, a);
    CHECK(d >= 1);
    CHECK(d <= 16);
    seen.insert(d);
  }
  CHECK(seen.count(1) == 1);
  CHECK(seen.count(16) == 1);
}

TEST_CASE("padding centres the kernel or is zero") {
  CHECK(centered_padding(9, 3) == 12);
  CHECK(centered_padding(7, 1) == 3);
  CHECK(centered_padding(11, 4) == 20);

  SplitMix64 rng(3);
  int padded = 0;
  for (int i = 0; i < 2000; ++i) {
    const int p = sample_padding(rng, 7, 1);
    CHECK((p == 0 || p == 3));
    padded += p != 0;
  }
  CHECK(padded > 900);
  CHECK(padded < 1100);
}

TEST_CASE("channel sampling") {
  SplitMix64 rng(5);
  CHECK(sample_channels(rng, 1) == std::vector<int>{0});
  CHECK(channel_count_from_exponent(3.0, 8) == 8);
  CHECK(channel_count_from_exponent(1.7, 5) == 3);
  CHECK(channel_count_from_exponent(0.0, 5) == 1);
  CHECK(channel_count_from_exponent(9.0, 5) == 5);

  for (const std::size_t n : {2u, 3u, 5u, 8u, 13u}) {
    std::map<int, int> counts;
    for (int i = 0; i < 500; ++i) {
      const auto ch = sample_channels(rng, n);
      REQUIRE(!ch.empty());
      CHECK(ch.size() <= n);
      CHECK(std::is_sorted(ch.begin(), ch.end()));
      CHECK(std::adjacent_find(ch.begin(), ch.end()) == ch.end());
      CHECK(ch.back() < static_cast<int>(n));
      for (const int c : ch) ++counts[c];
    }
    // every channel gets picked at some point
    CHECK(counts.size() == n);
  }
}

TEST_CASE("generated bank satisfies its invariants") {
  GenOptions opt;
  opt.seed = 42;
  const KernelBank bank = generate_bank(100, 1, 1000, opt);
  REQUIRE(bank.size() == 1000);
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const KernelView kv = bank.kernel(k);
    CHECK((kv.length == 7 || kv.length == 9 || kv.length == 11));
    CHECK(kv.bias >= -1.0);
    CHECK(kv.bias <= 1.0);
    CHECK(kv.dilation >= 1);
    CHECK((kv.length - 1) * kv.dilation <= 99);
    CHECK((kv.padding == 0 || kv.padding == (kv.length - 1) * kv.dilation / 2));
    CHECK(kv.channels.size() == 1);
    CHECK(kv.weights.size() == static_cast<std::size_t>(kv.length));
    const double mean = std::accumulate(kv.weights.begin(), kv.weights.end(), 0.0) / kv.length;
    CHECK(std::abs(mean) <= 1e-6);
    if (kv.padding == 0) CHECK(100 - (kv.length - 1) * kv.dilation >= 1);
  }
}

TEST_CASE("generation is deterministic in the seed") {
  GenOptions opt;
  opt.seed = 7;
  const KernelBank a = generate_bank(256, 3, 200, opt);
  const KernelBank b = generate_bank(256, 3, 200, opt);
  CHECK(a == b);
  opt.seed = 8;
  const KernelBank c = generate_bank(256, 3, 200, opt);
  CHECK_FALSE(a == c);
}

TEST_CASE("uncentred weights keep their raw draws") {
  GenOptions opt;
  opt.seed = 1;
  opt.center_weights = false;
  const KernelBank bank = generate_bank(100, 1, 200, opt);
  double worst = 0;
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const auto w = bank.kernel(k).weights;
    worst = std::max(worst, std::abs(std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size())));
  }
  CHECK(worst > 0.1);
}

TEST_CASE("multivariate kernels centre across all channels jointly") {
  GenOptions opt;
  opt.seed = 99;
  const KernelBank bank = generate_bank(64, 6, 500, opt);
  std::size_t multi = 0;
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const KernelView kv = bank.kernel(k);
    CHECK(kv.channels.size() >= 1);
    CHECK(kv.channels.size() <= 6);
    CHECK(kv.weights.size() == kv.channels.size() * static_cast<std::size_t>(kv.length));
    const double mean = std::accumulate(kv.weights.begin(), kv.weights.end(), 0.0) /
                        static_cast<double>(kv.weights.size());
    CHECK(std::abs(mean) <= 1e-6);
    multi += kv.channels.size() > 1;
  }
  CHECK(multi > 100);
}

TEST_CASE("length frequencies are uniform over {7, 9, 11}") {
  GenOptions opt;
  opt.seed = 2024;
  const KernelBank bank = generate_bank(500, 1, 3000, opt);
  std::map<int, double> freq;
  for (const int l : bank.lengths()) freq[l] += 1;
  const double expected = 1000.0;
  double chi2 = 0;
  for (const int l : kKernelLengths) chi2 += (freq[l] - expected) * (freq[l] - expected) / expected;
  // df = 2: survival function is exp(-chi2 / 2)
  CHECK(std::exp(-chi2 / 2) > 0.001);
}

TEST_CASE("bias mean is near zero") {
  GenOptions opt;
  opt.seed = 77;
  const KernelBank bank = generate_bank(300, 1, 10000, opt);
  const double mean = std::accumulate(bank.biases().begin(), bank.biases().end(), 0.0) / 10000.0;
  CHECK(mean >= -0.05);
  CHECK(mean <= 0.05);
}

TEST_CASE("bank generation rejects short series") {
  CHECK_THROWS_AS(generate_bank(10, 1, 5, {}), InvalidInput);
  CHECK_THROWS_AS(generate_bank(100, 1, 0, {}), InvalidInput);
  CHECK_THROWS_AS(generate_bank(100, 0, 5, {}), InvalidInput);
}

TEST_CASE("push_back validates kernels") {
  KernelBank bank = KernelBank::with_shape(20, 2, {});
  const std::vector<double> w3{1, 2, 3};
  const std::vector<int> ch0{0};
  bank.push_back(3, w3, 0.5, 2, 0, ch0);
  CHECK(bank.size() == 1);
  CHECK_THROWS_AS(bank.push_back(3, w3, 0.5, 0, 0, ch0), InvalidInput);
  CHECK_THROWS_AS(bank.push_back(3, w3, 0.5, 1, -1, ch0), InvalidInput);
  CHECK_THROWS_AS(bank.push_back(4, w3, 0.5, 1, 0, ch0), InvalidInput);
  const std::vector<int> bad_order{1, 0};
  const std::vector<double> w6{1, 2, 3, 4, 5, 6};
  CHECK_THROWS_AS(bank.push_back(3, w6, 0.5, 1, 0, bad_order), InvalidInput);
  const std::vector<int> out_of_range{2};
  CHECK_THROWS_AS(bank.push_back(3, w3, 0.5, 1, 0, out_of_range), InvalidInput);
  // span (3-1)*10 + 1 = 21 > 20
  CHECK_THROWS_AS(bank.push_back(3, w3, 0.5, 10, 0, ch0), InvalidInput);
}

TEST_CASE("bank binary format round-trips and rejects corruption") {
  for (const std::uint64_t seed : {1ull, 2ull, 3ull, 0xDEADBEEFull}) {
    GenOptions opt;
    opt.seed = seed;
    opt.include_mpv = seed % 2 == 0;
    opt.center_weights = seed != 3;
    const KernelBank bank = generate_bank(120, 1 + seed % 4, 50, opt);
    std::stringstream buf;
    bank.save(buf);
    CHECK(KernelBank::load(buf) == bank);
  }

  GenOptions opt;
  const KernelBank bank = generate_bank(50, 1, 4, opt);
  std::stringstream buf;
  bank.save(buf);
  std::string bytes = buf.str();

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(KernelBank::load(truncated), ParseError);

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::stringstream bm(bad_magic);
  CHECK_THROWS_AS(KernelBank::load(bm), ParseError);

  std::string bad_version = bytes;
  bad_version[4] = 9;
  std::stringstream bv(bad_version);
  CHECK_THROWS_AS(KernelBank::load(bv), ParseError);
}

TEST_CASE("bank header layout is little-endian") {
  GenOptions opt;
  opt.seed = 0x0102030405060708ull;
  const KernelBank bank = generate_bank(33, 2, 3, opt);
  std::stringstream buf;
  bank.save(buf);
  const std::string b = buf.str();
  CHECK(b.substr(0, 4) == "RGKB");
  CHECK(static_cast<unsigned char>(b[4]) == 1);  // version
  CHECK(static_cast<unsigned char>(b[8]) == 3);  // count
  CHECK(static_cast<unsigned char>(b[16]) == 33);  // l_series
  CHECK(static_cast<unsigned char>(b[24]) == 2);  // n_channels
  CHECK(static_cast<unsigned char>(b[32]) == 0x08);  // seed, low byte first
  CHECK(static_cast<unsigned char>(b[39]) == 0x01);
}

TEST_CASE("bank JSON dump mirrors the bank") {
  GenOptions opt;
  opt.seed = 5;
  const KernelBank bank = generate_bank(80, 2, 6, opt);
  const auto doc = nlohmann::json::parse(bank.to_json());
  CHECK(doc["l_series"] == 80);
  CHECK(doc["n_channels"] == 2);
  REQUIRE(doc["kernels"].size() == 6);
  for (std::size_t k = 0; k < 6; ++k) {
    const auto& j = doc["kernels"][k];
    const KernelView kv = bank.kernel(k);
    CHECK(j["length"] == kv.length);
    CHECK(j["dilation"] == kv.dilation);
    CHECK(j["padding"] == kv.padding);
    CHECK(j["bias"].get<double>() == kv.bias);
    CHECK(j["weights"].size() == kv.weights.size());
  }
}

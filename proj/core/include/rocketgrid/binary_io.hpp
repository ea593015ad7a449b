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

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "rocketgrid/error.hpp"

// Little-endian primitive encoding shared by every rocketgrid binary format.
// Each file starts with a four-byte magic and a u32 format version.

namespace rocketgrid::binio {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
  requires std::is_arithmetic_v<T>
void write(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
  requires std::is_arithmetic_v<T>
T read(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) {
    throw ParseError("unexpected end of binary stream");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

template <typename T, typename Range>
void write_array(std::ostream& out, const Range& values) {
  for (const auto& v : values) write<T>(out, static_cast<T>(v));
}

template <typename T, typename Out = T>
std::vector<Out> read_array(std::istream& in, std::uint64_t count) {
  std::vector<Out> values;
  values.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
  for (std::uint64_t i = 0; i < count; ++i) values.push_back(static_cast<Out>(read<T>(in)));
  return values;
}

void write_string(std::ostream& out, const std::string& s);
std::string read_string(std::istream& in);

void write_header(std::ostream& out, const char (&magic)[5], std::uint32_t version);

/// Validates magic and returns the version; throws ParseError on mismatch or
/// when the version is newer than `max_version`.
std::uint32_t read_header(std::istream& in, const char (&magic)[5], std::uint32_t max_version);

}  // namespace rocketgrid::binio

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

#include "rocketgrid/binary_io.hpp"

namespace rocketgrid::binio {

void write_string(std::ostream& out, const std::string& s) {
  write<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  const auto n = read<std::uint64_t>(in);
  if (n > (1ull << 32)) throw ParseError("string length out of range");
  std::string s(static_cast<std::size_t>(n), '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw ParseError("unexpected end of binary stream");
  }
  return s;
}

void write_header(std::ostream& out, const char (&magic)[5], std::uint32_t version) {
  out.write(magic, 4);
  write<std::uint32_t>(out, version);
}

std::uint32_t read_header(std::istream& in, const char (&magic)[5], std::uint32_t max_version) {
  char got[4];
  if (!in.read(got, 4)) throw ParseError("unexpected end of binary stream");
  if (std::memcmp(got, magic, 4) != 0) {
    throw ParseError(std::string("bad magic, expected ") + magic);
  }
  const auto version = read<std::uint32_t>(in);
  if (version == 0 || version > max_version) {
    throw ParseError(std::string(magic) + ": unsupported format version " + std::to_string(version));
  }
  return version;
}

}  // namespace rocketgrid::binio

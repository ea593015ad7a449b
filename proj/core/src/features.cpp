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

#include "rocketgrid/features.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rocketgrid/binary_io.hpp"
#include "rocketgrid/error.hpp"

namespace rocketgrid {

namespace {

constexpr char kFeatureMagic[5] = "RGFM";
constexpr std::uint32_t kFeatureVersion = 1;

}  // namespace

std::string_view to_string(Precision p) {
  return p == Precision::kSingle ? "single" : "double";
}

Precision parse_precision(std::string_view s) {
  if (s == "single" || s == "float" || s == "f32") return Precision::kSingle;
  if (s == "double" || s == "f64") return Precision::kDouble;
  throw InvalidInput("unknown precision '" + std::string(s) + "' (expected single or double)");
}

FeatureMatrix::FeatureMatrix(std::size_t n_instances, std::size_t n_kernels,
                             std::size_t features_per_kernel, Precision precision)
    : n_instances_(n_instances),
      n_kernels_(n_kernels),
      features_per_kernel_(features_per_kernel),
      precision_(precision),
      values_(n_instances * n_kernels * features_per_kernel, 0.0) {
  if (features_per_kernel != 2 && features_per_kernel != 3) {
    throw InvalidInput("features per kernel must be 2 or 3");
  }
}

void FeatureMatrix::append_rows(const FeatureMatrix& other) {
  if (other.n_kernels_ != n_kernels_ || other.features_per_kernel_ != features_per_kernel_ ||
      other.precision_ != precision_) {
    throw InvalidInput("cannot append feature rows with a different layout");
  }
  values_.insert(values_.end(), other.values_.begin(), other.values_.end());
  n_instances_ += other.n_instances_;
}

bool FeatureMatrix::bit_equal(const FeatureMatrix& other) const {
  if (n_instances_ != other.n_instances_ || n_kernels_ != other.n_kernels_ ||
      features_per_kernel_ != other.features_per_kernel_ || precision_ != other.precision_) {
    return false;
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(values_[i]) != std::bit_cast<std::uint64_t>(other.values_[i])) {
      return false;
    }
  }
  return true;
}

void FeatureMatrix::save(std::ostream& out) const {
  using namespace binio;
  write_header(out, kFeatureMagic, kFeatureVersion);
  write<std::uint64_t>(out, n_instances_);
  write<std::uint64_t>(out, n_kernels_);
  write<std::uint32_t>(out, static_cast<std::uint32_t>(features_per_kernel_));
  write<std::uint8_t>(out, static_cast<std::uint8_t>(precision_));
  if (precision_ == Precision::kSingle) {
    write_array<float>(out, values_);
  } else {
    write_array<double>(out, values_);
  }
  if (!out) throw std::runtime_error("failed writing feature matrix");
}

FeatureMatrix FeatureMatrix::load(std::istream& in) {
  using namespace binio;
  read_header(in, kFeatureMagic, kFeatureVersion);
  const auto n = read<std::uint64_t>(in);
  const auto k = read<std::uint64_t>(in);
  const auto fpk = read<std::uint32_t>(in);
  const auto tag = read<std::uint8_t>(in);
  if (tag != static_cast<std::uint8_t>(Precision::kSingle) &&
      tag != static_cast<std::uint8_t>(Precision::kDouble)) {
    throw ParseError("unknown precision tag in feature matrix");
  }
  if (fpk != 2 && fpk != 3) throw ParseError("features per kernel must be 2 or 3");
  FeatureMatrix fm(n, k, fpk, static_cast<Precision>(tag));
  const std::uint64_t count = n * k * fpk;
  fm.values_ = fm.precision_ == Precision::kSingle ? read_array<float, double>(in, count)
                                                   : read_array<double>(in, count);
  return fm;
}

void FeatureMatrix::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save(out);
}

FeatureMatrix FeatureMatrix::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load(in);
}

std::string FeatureMatrix::to_csv() const {
  static constexpr const char* kNames[] = {"ppv", "max", "mpv"};
  std::ostringstream out;
  for (std::size_t k = 0; k < n_kernels_; ++k) {
    for (std::size_t f = 0; f < features_per_kernel_; ++f) {
      if (k + f > 0) out << ',';
      out << kNames[f] << '_' << k;
    }
  }
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < n_instances_; ++i) {
    for (std::size_t j = 0; j < cols(); ++j) {
      if (j > 0) out << ',';
      const double v = at(i, j);
      const auto res = precision_ == Precision::kSingle
                           ? std::to_chars(buf, buf + sizeof(buf), static_cast<float>(v))
                           : std::to_chars(buf, buf + sizeof(buf), v);
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace rocketgrid

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

#include <cstddef>
#include <span>

namespace rocketgrid {

/// One multichannel series stored channel-major: channel c occupies
/// values[c * l_series, (c + 1) * l_series).
template <typename T>
struct SeriesView {
  std::span<const T> values;
  std::size_t n_channels = 1;
  std::size_t l_series = 0;

  std::span<const T> channel(std::size_t c) const { return values.subspan(c * l_series, l_series); }
};

}  // namespace rocketgrid

// Copyright 2026 The eventinr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EVENTINR_GRID_HPP_
#define EVENTINR_GRID_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace eventinr {

/// Dense row-major H×W image. Pixel (x, y) lives at index y * width + x,
/// which is also the output-neuron ordering of the network.
template <class T>
struct Grid {
  int height = 0;
  int width = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(int h, int w, T fill = T{})
      : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

  std::size_t size() const { return data.size(); }
  T& operator()(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
  const T& operator()(int y, int x) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::span<T> span() { return data; }
  std::span<const T> span() const { return data; }
  bool same_shape(const Grid& other) const {
    return height == other.height && width == other.width;
  }
  bool operator==(const Grid&) const = default;
};

using Frame = Grid<double>;
using Image8 = Grid<std::uint8_t>;

}  // namespace eventinr

#endif  // EVENTINR_GRID_HPP_

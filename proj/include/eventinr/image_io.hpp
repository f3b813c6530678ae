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

// 8-bit binary portable graymaps (P5).

#ifndef EVENTINR_IMAGE_IO_HPP_
#define EVENTINR_IMAGE_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "eventinr/grid.hpp"

namespace eventinr {

void write_pgm(const std::filesystem::path& path, const Image8& image);
Image8 read_pgm(const std::filesystem::path& path);

/// Sorted `*.pgm` files of a directory.
std::vector<std::filesystem::path> list_pgm(const std::filesystem::path& dir);

/// Writes `contents` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace eventinr

#endif  // EVENTINR_IMAGE_IO_HPP_

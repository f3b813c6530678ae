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

#ifndef EVENTINR_EVAL_HPP_
#define EVENTINR_EVAL_HPP_

#include <span>
#include <string>
#include <vector>

#include "eventinr/grid.hpp"

namespace eventinr {

double mse(const Frame& pred, const Frame& ref);

/// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, dynamic range 1, averaged over fully covered windows.
double ssim(const Frame& pred, const Frame& ref);

struct ClaheConfig {
  int tiles_x = 8;
  int tiles_y = 8;
  double clip_limit = 2.0;  // multiple of the mean bin height; <= 0 disables
};

/// Contrast limited adaptive histogram equalization. Tiles that do not divide
/// the image are edge-extended; tile mappings are bilinearly interpolated.
Image8 clahe(const Image8& image, const ClaheConfig& cfg = {});

Frame to_unit(const Image8& image);

struct MetricReport {
  std::vector<double> mse;
  std::vector<double> ssim;
  double mean_mse = 0.0;
  double mean_ssim = 0.0;
  std::size_t frames = 0;
  bool clahe = true;
};

MetricReport evaluate_frames(std::span<const Image8> pred, std::span<const Image8> ref,
                             bool use_clahe, const ClaheConfig& cfg = {});

/// frame_index,time,mse,ssim
std::string metric_csv(const MetricReport& report, std::span<const double> times);

}  // namespace eventinr

#endif  // EVENTINR_EVAL_HPP_

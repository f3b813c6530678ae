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

#include "eventinr/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "eventinr/error.hpp"

namespace eventinr {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    taps[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable "valid" Gaussian filter.
Frame filter_valid(const Frame& in, const std::array<double, kWindow>& taps) {
  const int oh = in.height - kWindow + 1;
  const int ow = in.width - kWindow + 1;
  Frame rows(in.height, ow);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += taps[k] * in(y, x + k);
      rows(y, x) = s;
    }
  }
  Frame out(oh, ow);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += taps[k] * rows(y + k, x);
      out(y, x) = s;
    }
  }
  return out;
}

void require_same_shape(const Frame& a, const Frame& b) {
  if (!a.same_shape(b)) throw Error(ErrorKind::kShapeMismatch, "frames differ in size");
}

}  // namespace

double mse(const Frame& pred, const Frame& ref) {
  require_same_shape(pred, ref);
  if (pred.size() == 0) throw Error(ErrorKind::kTooSmall, "empty frame");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred.data[i] - ref.data[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

double ssim(const Frame& pred, const Frame& ref) {
  require_same_shape(pred, ref);
  if (std::min(pred.height, pred.width) < kWindow) {
    throw Error(ErrorKind::kTooSmall, "SSIM needs frames of at least 11x11");
  }
  static const auto taps = gaussian_taps();
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  Frame xx(pred.height, pred.width), yy(pred.height, pred.width), xy(pred.height, pred.width);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    xx.data[i] = pred.data[i] * pred.data[i];
    yy.data[i] = ref.data[i] * ref.data[i];
    xy.data[i] = pred.data[i] * ref.data[i];
  }
  const Frame mu_x = filter_valid(pred, taps);
  const Frame mu_y = filter_valid(ref, taps);
  const Frame e_xx = filter_valid(xx, taps);
  const Frame e_yy = filter_valid(yy, taps);
  const Frame e_xy = filter_valid(xy, taps);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x.data[i];
    const double my = mu_y.data[i];
    const double vx = e_xx.data[i] - mx * mx;
    const double vy = e_yy.data[i] - my * my;
    const double cov = e_xy.data[i] - mx * my;
    total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mu_x.size());
}

Image8 clahe(const Image8& image, const ClaheConfig& cfg) {
  if (cfg.tiles_x < 1 || cfg.tiles_y < 1) throw Error(ErrorKind::kInvalidArgument, "tile grid must be >= 1x1");
  if (image.height < 1 || image.width < 1) return image;
  const int tx = cfg.tiles_x;
  const int ty = cfg.tiles_y;
  const int tw = (image.width + tx - 1) / tx;
  const int th = (image.height + ty - 1) / ty;
  const double area = static_cast<double>(tw) * th;

  // Mapping per tile, kept in floating point for interpolation.
  std::vector<std::array<double, 256>> luts(static_cast<std::size_t>(tx) * ty);
  for (int j = 0; j < ty; ++j) {
    for (int i = 0; i < tx; ++i) {
      std::array<double, 256> hist{};
      for (int y = j * th; y < (j + 1) * th; ++y) {
        const int yy = std::min(y, image.height - 1);
        for (int x = i * tw; x < (i + 1) * tw; ++x) {
          hist[image(yy, std::min(x, image.width - 1))] += 1.0;
        }
      }
      if (cfg.clip_limit > 0.0) {
        const double limit = cfg.clip_limit * area / 256.0;
        double excess = 0.0;
        for (double& h : hist) {
          if (h > limit) {
            excess += h - limit;
            h = limit;
          }
        }
        const double share = excess / 256.0;
        for (double& h : hist) h += share;
      }
      // Histogram-midpoint mapping: a flat histogram yields the identity.
      auto& lut = luts[static_cast<std::size_t>(j) * tx + i];
      double below = 0.0;
      for (int v = 0; v < 256; ++v) {
        lut[v] = std::clamp((below + 0.5 * hist[v]) * 256.0 / area - 0.5, 0.0, 255.0);
        below += hist[v];
      }
    }
  }

  Image8 out(image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    const double gy = (y + 0.5) / th - 0.5;
    const int y0 = std::clamp(static_cast<int>(std::floor(gy)), 0, ty - 1);
    const int y1 = std::min(y0 + 1, ty - 1);
    const double ay = std::clamp(gy - y0, 0.0, 1.0);
    for (int x = 0; x < image.width; ++x) {
      const double gx = (x + 0.5) / tw - 0.5;
      const int x0 = std::clamp(static_cast<int>(std::floor(gx)), 0, tx - 1);
      const int x1 = std::min(x0 + 1, tx - 1);
      const double ax = std::clamp(gx - x0, 0.0, 1.0);
      const int v = image(y, x);
      auto at = [&](int tj, int ti) { return luts[static_cast<std::size_t>(tj) * tx + ti][v]; };
      const double top = (1.0 - ax) * at(y0, x0) + ax * at(y0, x1);
      const double bottom = (1.0 - ax) * at(y1, x0) + ax * at(y1, x1);
      const double value = (1.0 - ay) * top + ay * bottom;
      out(y, x) = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
    }
  }
  return out;
}

Frame to_unit(const Image8& image) {
  Frame f(image.height, image.width);
  for (std::size_t i = 0; i < image.size(); ++i) f.data[i] = image.data[i] / 255.0;
  return f;
}

MetricReport evaluate_frames(std::span<const Image8> pred, std::span<const Image8> ref,
                             bool use_clahe, const ClaheConfig& cfg) {
  if (pred.size() != ref.size()) {
    throw Error(ErrorKind::kShapeMismatch, "prediction and reference frame counts differ");
  }
  MetricReport report;
  report.clahe = use_clahe;
  report.frames = pred.size();
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const Frame p = to_unit(use_clahe ? clahe(pred[k], cfg) : pred[k]);
    const Frame r = to_unit(use_clahe ? clahe(ref[k], cfg) : ref[k]);
    report.mse.push_back(mse(p, r));
    report.ssim.push_back(ssim(p, r));
  }
  if (!pred.empty()) {
    for (std::size_t k = 0; k < pred.size(); ++k) {
      report.mean_mse += report.mse[k];
      report.mean_ssim += report.ssim[k];
    }
    report.mean_mse /= static_cast<double>(pred.size());
    report.mean_ssim /= static_cast<double>(pred.size());
  }
  return report;
}

std::string metric_csv(const MetricReport& report, std::span<const double> times) {
  std::string out = "frame_index,time,mse,ssim\n";
  char buf[128];
  for (std::size_t k = 0; k < report.frames; ++k) {
    const double t = k < times.size() ? times[k] : std::nan("");
    const int n = std::snprintf(buf, sizeof buf, "%zu,%.9f,%.9g,%.9g\n", k, t, report.mse[k],
                                report.ssim[k]);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

}  // namespace eventinr

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


#include <doctest.h>

#include <cmath>

#include "eventinr/error.hpp"
#include "eventinr/image_io.hpp"
#include "eventinr/pipeline.hpp"
#include "eventinr/reconstruct.hpp"
#include "eventinr/simulator.hpp"
#include "support.hpp"

using namespace eventinr;
using Eigen::VectorXd;

namespace {

Partition make_partition(int index, double lo, double hi, SirenModel model) {
  Partition p;
  p.index = index;
  p.core_lo = p.span_lo = lo;
  p.core_hi = p.span_hi = hi;
  p.model = std::move(model);
  return p;
}

double max_abs_diff(const Frame& a, const VectorXd& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data[i] - b[static_cast<Eigen::Index>(i)]));
  return m;
}

LogVideo constant_video(double value, int frames) {
  LogVideo v;
  v.width = 3;
  v.height = 2;
  for (int k = 0; k < frames; ++k) {
    v.times.push_back(k * 0.1);
    v.frames.push_back(Frame(2, 3, value));
  }
  return v;
}

}  // namespace

TEST_CASE("single partition sampling equals the model") {
  const TimeDomain dom{0.0, 2.0};
  const auto m = SirenModel::for_frames(3, 4, 2, 16, 30.0, 1, dom);
  const std::vector<Partition> parts{make_partition(0, 0.0, 2.0, m)};
  const std::vector<double> times{0.0, 0.3, 1.0, 1.99, 2.0};
  const LogVideo v = sample_video(parts, times);
  REQUIRE(v.frames.size() == times.size());
  CHECK(v.width == 4);
  CHECK(v.height == 3);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(max_abs_diff(v.frames[k], m.forward(dom.normalize(times[k]))) < 1e-12);
  }
  CHECK_THROWS_AS(sample_video(parts, std::vector<double>{2.5}), Error);
  CHECK_THROWS_AS(sample_video(parts, std::vector<double>{0.5, 0.5}), Error);
}

TEST_CASE("constant-offset neighbours stitch without a seam") {
  // Same network and time domain; the second model is shifted by c.
  const TimeDomain dom{0.0, 2.0};
  const auto m0 = SirenModel::for_frames(2, 3, 2, 16, 30.0, 2, dom);
  auto m1 = m0;
  m1.params().biases.back().array() += 0.8;
  std::vector<Partition> parts{make_partition(0, 0.0, 1.25, m0), make_partition(1, 0.75, 2.0, m1)};
  const auto off = stitch_offsets(parts);
  REQUIRE(off.size() == 2);
  CHECK((off[0] + off[1]).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((off[0].array() - 0.4).abs().maxCoeff() < 1e-9);

  std::vector<double> times;
  for (int k = 0; k <= 200; ++k) times.push_back(0.01 * k);
  const LogVideo v = sample_video(parts, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const VectorXd expect = m0.forward(dom.normalize(times[k])).array() + 0.4;
    REQUIRE(max_abs_diff(v.frames[k], expect) < 1e-9);
  }
}

TEST_CASE("overlap centre is an even blend") {
  const auto m0 = SirenModel::for_frames(2, 2, 1, 8, 30.0, 3, {0.0, 1.25});
  const auto m1 = SirenModel::for_frames(2, 2, 1, 8, 30.0, 4, {0.75, 2.0});
  std::vector<Partition> parts{make_partition(0, 0.0, 1.25, m0), make_partition(1, 0.75, 2.0, m1)};
  const auto off = stitch_offsets(parts);
  const double t = 1.0;
  const LogVideo v = sample_video(parts, std::vector<double>{t});
  const VectorXd a = m0.forward(m0.domain().normalize(t)) + off[0];
  const VectorXd b = m1.forward(m1.domain().normalize(t)) + off[1];
  CHECK(max_abs_diff(v.frames[0], 0.5 * a + 0.5 * b) < 1e-12);
  // Outside the overlap only one model contributes.
  const LogVideo left = sample_video(parts, std::vector<double>{0.5});
  CHECK(max_abs_diff(left.frames[0], m0.forward(m0.domain().normalize(0.5)) + off[0]) < 1e-12);
}

TEST_CASE("sampling does not depend on the thread count") {
  const auto m0 = SirenModel::for_frames(4, 4, 2, 16, 30.0, 5, {0.0, 1.25});
  const auto m1 = SirenModel::for_frames(4, 4, 2, 16, 30.0, 6, {0.75, 2.0});
  std::vector<Partition> parts{make_partition(0, 0.0, 1.25, m0), make_partition(1, 0.75, 2.0, m1)};
  const auto times = uniform_times(0.0, 2.0, 60.0);
  const LogVideo a = sample_video(parts, times, 1);
  const LogVideo b = sample_video(parts, times, 4);
  CHECK(a.frames == b.frames);
}

TEST_CASE("anchoring") {
  const LogVideo z = anchor_offset(constant_video(3.7, 4));
  for (const Frame& f : z.frames) {
    for (double v : f.data) CHECK(v == 0.0);
  }
  LogVideo v = constant_video(0.0, 5);
  double x = -2.0;
  for (Frame& f : v.frames) {
    for (double& d : f.data) d = (x += 0.37) * (x > 1.0 ? 3.0 : 1.0);
  }
  const LogVideo once = anchor_offset(v);
  const LogVideo twice = anchor_offset(once);
  CHECK(once.frames == twice.frames);
  CHECK(once.times == v.times);
}

TEST_CASE("tone mapping") {
  CHECK(quantize_unit(tone_map_value(0.0, 1.0)) == 128);
  CHECK(tone_map_value(0.0, 0.6) == doctest::Approx(0.659753955386447).epsilon(1e-12));
  CHECK(quantize_unit(tone_map_value(0.0, 0.6)) == 168);
  CHECK(tone_map_value(-800.0, 0.6) == 0.0);
  CHECK(tone_map_value(800.0, 0.6) == 1.0);
  const auto frames = tone_map(anchor_offset(constant_video(5.0, 2)), {0.6});
  for (const Image8& f : frames) {
    for (auto b : f.data) CHECK(b == 168);
  }
  CHECK_THROWS_AS(tone_map(constant_video(0.0, 1), {0.0}), Error);
}

TEST_CASE("property: tone mapping is monotone") {
  for (double gamma : {0.3, 0.6, 1.0, 2.2}) {
    double prev = -1.0;
    for (int i = 0; i <= 10000; ++i) {
      const double v = tone_map_value(-12.0 + 24.0 * i / 10000.0, gamma);
      REQUIRE(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("enhanced frames are linear in the window and zero for constant models") {
  auto m = SirenModel::for_frames(3, 3, 2, 16, 30.0, 7, {0.0, 1.0});
  std::vector<Partition> parts{make_partition(0, 0.0, 1.0, m)};
  const std::vector<double> times{0.1, 0.5, 0.9};
  const auto e1 = enhance_events(parts, times, 0.01);
  const auto e3 = enhance_events(parts, times, 0.03);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const VectorXd tan = m.forward_with_tangent(m.domain().normalize(times[k])).tangent;
    CHECK(max_abs_diff(e1[k], tan * m.domain().slope() * 0.01) < 1e-12);
    for (std::size_t i = 0; i < e1[k].size(); ++i) {
      CHECK(e3[k].data[i] == doctest::Approx(3.0 * e1[k].data[i]).epsilon(1e-12));
    }
  }
  parts[0].model.params().weights.back().setZero();
  for (const Frame& f : enhance_events(parts, times, 0.01)) {
    for (double v : f.data) CHECK(v == 0.0);
  }
  CHECK_THROWS_AS(enhance_events(parts, times, 0.0), Error);
}

TEST_CASE("signed values map around mid-gray") {
  Frame f(1, 3);
  f.data = {0.0, 1.0, -1.0};
  const Image8 g = signed_to_gray(f, 2.0);
  CHECK(g.data[0] == 128);
  CHECK(g.data[1] == 192);
  CHECK(g.data[2] == 64);
  CHECK_THROWS_AS(signed_to_gray(f, 0.0), Error);
}

TEST_CASE("uniform frame times") {
  CHECK(uniform_times(0.0, 1.0, 4.0) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(uniform_times(0.5, 0.6, 4.0) == std::vector<double>{0.5});
  CHECK_THROWS_AS(uniform_times(0.0, 1.0, 0.0), Error);
}

TEST_CASE("frames round-trip through PGM files") {
  test::TempDir dir("frames");
  Image8 a(3, 5), b(3, 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a.data[i] = static_cast<std::uint8_t>(i * 17);
    b.data[i] = static_cast<std::uint8_t>(255 - i);
  }
  const std::vector<Image8> frames{a, b};
  write_frames(dir.path(), frames, std::vector<double>{0.0, 0.5});
  const auto files = list_pgm(dir.path());
  REQUIRE(files.size() == 2);
  CHECK(read_pgm(files[0]) == a);
  CHECK(read_pgm(files[1]) == b);
  CHECK(read_timestamps_file(dir.path() / "times.txt") == std::vector<double>{0.0, 0.5});
}

TEST_CASE("mean alignment") {
  Frame p(2, 2), r(2, 2);
  p.data = {1, 2, 3, 4};
  r.data = {11, 12, 13, 14};
  CHECK(aligned_log_mse(p, r) == 0.0);
  const Frame a = align_mean(p, r);
  CHECK(a.data[0] == 11.0);
}

TEST_CASE("end-to-end reconstruction on a tiny stream") {
  const auto video = render_scene(SceneKind::kTranslatingGradient, 8, 8, 1.0, 60.0, 1);
  SimConfig sim;
  sim.threshold_c = 0.25;
  const EventStream s = simulate_events(video, sim);
  ReconstructOptions opts;
  opts.train.threshold_c = 0.25;
  opts.train.hidden_layers = 2;
  opts.train.hidden_width = 16;
  opts.train.total_iters = 12;
  opts.train.refine_at_iters = {4, 8};
  opts.train.partition_tau = 0.5;
  opts.train.overlap = 0.1;
  opts.fps = 20.0;
  const Reconstruction r = reconstruct_stream(s, opts);
  CHECK(r.ensemble.partitions.size() == 2);
  CHECK(r.frames.size() == r.video.frames.size());
  CHECK(r.video.times.front() == s.t_start);

  test::TempDir dir("recon");
  write_reconstruction(dir.path(), r);
  CHECK(list_pgm(dir.path()).size() == r.frames.size());
  CHECK(std::filesystem::exists(dir.path() / "partition_000.ckpt"));
  CHECK(std::filesystem::exists(dir.path() / "partition_001.ckpt"));
  CHECK(std::filesystem::exists(dir.path() / "report.csv"));
  const std::string csv = training_report_csv(r.ensemble);
  CHECK(csv.rfind("partition,iteration,frames,L_temp,L_reg,total\n", 0) == 0);
  CHECK(load_checkpoint(dir.path() / "partition_001.ckpt") == r.ensemble.partitions[1].model);
}

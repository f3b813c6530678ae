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


#include "eventinr/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <unistd.h>

#include "eventinr/error.hpp"
#include "eventinr/eval.hpp"
#include "eventinr/event_frames.hpp"
#include "eventinr/image_io.hpp"
#include "eventinr/pipeline.hpp"

namespace eventinr {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

struct Context {
  const SelftestOptions& options;
  fs::path work_dir;
  double c1_seconds = -1.0;  // criterion 1 wall-clock, reused by criterion 10
};

// Shared by criteria 1 and 6: aligned log-MSE and tone-mapped SSIM against
// the fixture's ground truth.
struct Fidelity {
  double log_mse = 0.0;
  double ssim = 0.0;
};

Fidelity fidelity(const LogVideo& video, const std::vector<Frame>& truth) {
  Fidelity f;
  const ToneMapConfig tone;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const Frame aligned = align_mean(video.frames[k], truth[k]);
    f.log_mse += mse(aligned, truth[k]);
    const LogVideo pair{aligned.width, aligned.height, {0.0, 1.0}, {aligned, truth[k]}};
    const std::vector<Image8> bytes = tone_map(pair, tone);
    f.ssim += ssim(to_unit(bytes[0]), to_unit(bytes[1]));
  }
  f.log_mse /= static_cast<double>(truth.size());
  f.ssim /= static_cast<double>(truth.size());
  return f;
}

TrainConfig fixture_config(const Fixture& fx) {
  TrainConfig cfg;
  cfg.threshold_c = fx.threshold_c;
  return cfg;
}

// Quick mode keeps the schedule and shrinks the network.
void make_quick(TrainConfig& cfg) { cfg.hidden_width = 128; }

CriterionResult closed_loop(Context& ctx) {
  const bool quick = ctx.options.quick;
  const Fixture fx = quick ? make_fixture(32, 2.0, 120.0, 0.25, 0.0) : make_fixture(64, 2.0, 240.0, 0.25, 0.0);
  TrainConfig cfg = fixture_config(fx);
  if (quick) make_quick(cfg);
  ReconstructOptions opts;
  opts.train = cfg;
  opts.times = fx.video.times;
  opts.threads = ctx.options.threads;
  const auto start = Clock::now();
  const Reconstruction rec = reconstruct_stream(fx.stream, opts);
  const double secs = since(start);
  ctx.c1_seconds = secs;
  const Fidelity f = fidelity(rec.video, fx.log_truth);
  const double max_mse = quick ? 0.3 : 0.01;
  const double min_ssim = quick ? 0.80 : 0.90;
  const double max_secs = quick ? 15.0 : 120.0;
  CriterionResult r;
  r.pass = f.log_mse < max_mse && f.ssim > min_ssim && secs < max_secs;
  r.detail = fmt("log-MSE %.4f (< %g), SSIM %.4f (> %.2f), train+sample %.1f s (< %.0f s)",
                 f.log_mse, max_mse, f.ssim, min_ssim, secs, max_secs);
  return r;
}

CriterionResult gradient_oracle(Context&) {
  const auto start = Clock::now();
  const SirenModel model({1, 8, 8, 8, 16}, 30.0, 11, 4, 4, TimeDomain{0.0, 1.0});
  EventStream stream;
  stream.width = 4;
  stream.height = 4;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> when(0.0, 1.0);
  for (int k = 0; k < 400; ++k) {
    stream.events.push_back({when(rng), static_cast<int>(rng() % 4), static_cast<int>(rng() % 4),
                             (rng() & 1) ? 1 : -1});
  }
  std::sort(stream.events.begin(), stream.events.end(),
            [](const Event& a, const Event& b) { return a.t < b.t; });
  stream.t_start = 0.0;
  stream.t_end = 1.0;
  const EventFrameStack stack = stack_uniform(stream, 1.0 / 8.0, 0.25);
  std::vector<std::size_t> idx(stack.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  constexpr double kLambda = 0.05;

  const Objective obj = evaluate_objective(model, stack, idx, kLambda);
  const std::vector<double> theta = model.params().flatten();
  const std::vector<double> grad = obj.grads.flatten();
  double grad_scale = 1.0;
  for (double g : grad) grad_scale = std::max(grad_scale, std::abs(g));
  const double floor = 1e-8 * grad_scale;
  double worst_grad = 0.0;
  SirenModel probe = model;
  for (std::size_t p = 0; p < theta.size(); ++p) {
    const double h = 1e-6 * std::max(1.0, std::abs(theta[p]));
    std::vector<double> shifted = theta;
    shifted[p] = theta[p] + h;
    probe.params().assign_flat(shifted);
    const double up = evaluate_objective(probe, stack, idx, kLambda).loss.total;
    shifted[p] = theta[p] - h;
    probe.params().assign_flat(shifted);
    const double down = evaluate_objective(probe, stack, idx, kLambda).loss.total;
    const double fd = (up - down) / (2.0 * h);
    const double rel = std::abs(fd - grad[p]) / std::max({std::abs(fd), std::abs(grad[p]), floor});
    worst_grad = std::max(worst_grad, rel);
  }

  double worst_tangent = 0.0;
  // With omega0 = 30 the truncation error of h = 1e-4 alone is ~1e-3; 1e-6 keeps
  // both truncation and round-off far below the tolerance.
  constexpr double kH = 1e-6;
  for (double t : {-0.93, -0.41, 0.0, 0.37, 0.88}) {
    const FrameTangent ft = model.forward_with_tangent(t);
    const Eigen::VectorXd fd = (model.forward(t + kH) - model.forward(t - kH)) / (2.0 * kH);
    const double scale = 1e-6 * std::max(1.0, ft.tangent.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < fd.size(); ++i) {
      const double rel = std::abs(fd[i] - ft.tangent[i]) /
                         std::max({std::abs(fd[i]), std::abs(ft.tangent[i]), scale});
      worst_tangent = std::max(worst_tangent, rel);
    }
  }
  const double secs = since(start);
  CriterionResult r;
  r.pass = worst_grad < 1e-3 && worst_tangent < 1e-4 && secs < 5.0;
  r.detail = fmt("%ld parameters, worst gradient rel. error %.2e (< 1e-3), worst tangent rel. "
                 "error %.2e (< 1e-4), %.2f s (< 5 s)",
                 static_cast<long>(theta.size()), worst_grad, worst_tangent, secs);
  return r;
}

CriterionResult quantization(Context& ctx) {
  const Fixture fx = ctx.options.quick ? make_fixture(32, 1.0, 120.0, 0.25, 0.0)
                                       : make_fixture(64, 2.0, 240.0, 0.25, 0.0);
  const auto start = Clock::now();
  std::vector<long> net(fx.stream.width * static_cast<std::size_t>(fx.stream.height), 0);
  for (const Event& e : fx.stream.events) net[static_cast<std::size_t>(e.y) * fx.stream.width + e.x] += e.polarity;
  const Frame& first = fx.log_truth.front();
  const Frame& last = fx.log_truth.back();
  std::size_t ok = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const double err = std::abs(fx.threshold_c * static_cast<double>(net[i]) - (last.data[i] - first.data[i]));
    worst = std::max(worst, err);
    if (err < fx.threshold_c) ++ok;
  }
  const double secs = since(start);
  CriterionResult r;
  r.pass = ok == net.size() && secs < 1.0;
  r.detail = fmt("%zu/%zu pixels within C (worst residual %.4f, C = %.2f), %zu events, %.3f s (< 1 s)",
                 ok, net.size(), worst, fx.threshold_c, fx.stream.size(), secs);
  return r;
}

CriterionResult conservation(Context& ctx) {
  const Fixture fx = make_fixture(32, ctx.options.quick ? 1.0 : 2.0, 120.0, 0.25, 0.0);
  const auto start = Clock::now();
  TrainConfig cfg = fixture_config(fx);
  cfg.hidden_layers = 1;
  cfg.hidden_width = 4;
  std::vector<Partition> parts = make_partitions(fx.stream, cfg);
  Partition& part = parts.front();

  bool identical = true;
  bool doubled = true;
  EventFrameStack stack = part.stack;
  for (int s = 1; s < cfg.stages; ++s) {
    const EventFrameStack finer = refine_bins(stack, part.events);
    identical = identical && total_counts(finer) == total_counts(stack);
    doubled = doubled && finer.size() == 2 * stack.size();
    stack = finer;
  }
  // The schedule itself: T must double exactly at iterations 100 and 200.
  const TrainReport report = train_partition(part, cfg);
  const std::size_t t0 = report.resolution.front();
  bool schedule = report.history.size() == static_cast<std::size_t>(cfg.total_iters);
  for (std::size_t it = 0; it < report.resolution.size(); ++it) {
    const std::size_t expect = it < 100 ? t0 : (it < 200 ? 2 * t0 : 4 * t0);
    schedule = schedule && report.resolution[it] == expect;
  }
  const double secs = since(start);
  CriterionResult r;
  r.pass = identical && doubled && schedule && secs < 1.0;
  r.detail = fmt("per-pixel sums %s, T %zu -> %zu -> %zu at iterations 100/200 (%s), %.3f s (< 1 s)",
                 identical ? "bit-identical" : "DIFFER", t0, report.resolution[std::min<std::size_t>(150, report.resolution.size() - 1)],
                 report.final_resolution(), schedule && doubled ? "exact" : "WRONG", secs);
  return r;
}

CriterionResult null_space(Context& ctx) {
  const Fixture fx = make_fixture(16, 1.0, 120.0, 0.25, 0.0);
  (void)ctx;
  const auto start = Clock::now();
  const SirenModel base = SirenModel::for_frames(16, 16, 3, 32, 30.0, 3, TimeDomain{fx.stream.t_start, fx.stream.t_end});
  const EventFrameStack stack = stack_uniform(fx.stream, 1.0 / 32.0, fx.threshold_c);
  std::vector<std::size_t> idx(stack.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const LossValue ref = evaluate_objective(base, stack, idx, 0.05).loss;
  double worst = 0.0;
  for (double c : {-3.0, 0.7, 10.0}) {
    SirenModel shifted = base;
    shifted.params().biases.back().array() += c;
    const LossValue v = evaluate_objective(shifted, stack, idx, 0.05).loss;
    worst = std::max({worst, std::abs(v.temporal - ref.temporal) / ref.temporal,
                      std::abs(v.reg - ref.reg) / ref.reg});
  }
  const double secs = since(start);
  CriterionResult r;
  r.pass = worst <= 1e-12 && secs < 1.0;
  r.detail = fmt("worst relative change of L_temp / L_reg over c in {-3, 0.7, 10}: %.2e (<= 1e-12), "
                 "%.3f s (< 1 s)", worst, secs);
  return r;
}

CriterionResult ablation(Context& ctx) {
  const bool quick = ctx.options.quick;
  const Fixture fx = quick ? make_fixture(32, 1.0, 120.0, 0.25, 0.5) : make_fixture(64, 2.0, 240.0, 0.25, 0.5);
  TrainConfig cfg = fixture_config(fx);
  if (quick) cfg.hidden_width = 64;
  auto run = [&](Ablation variant, double& train_secs) {
    ReconstructOptions opts;
    opts.train = ablation_config(cfg, variant);
    opts.times = fx.video.times;
    opts.threads = ctx.options.threads;
    const Reconstruction rec = reconstruct_stream(fx.stream, opts);
    train_secs = 0.0;
    for (const TrainReport& rep : rec.ensemble.reports) train_secs += rep.seconds;
    return std::pair{fidelity(rec.video, fx.log_truth), rec.ensemble.reports.front().final_resolution()};
  };
  double full_secs = 0.0, base_secs = 0.0, c2f_secs = 0.0;
  const auto [full, full_t] = run(Ablation::kFull, full_secs);
  const auto [base, base_t] = run(Ablation::kBase, base_secs);
  const auto [c2f, c2f_t] = run(Ablation::kBaseC2F, c2f_secs);
  CriterionResult r;
  r.pass = full.log_mse <= base.log_mse && c2f_secs < base_secs && base_t == c2f_t;
  r.detail = fmt("log-MSE full %.4f <= base %.4f; train time base+C2F %.1f s < base %.1f s at final "
                 "T %zu/%zu", full.log_mse, base.log_mse, c2f_secs, base_secs, c2f_t, base_t);
  (void)full_t;
  (void)full_secs;
  return r;
}

CriterionResult ensembling(Context& ctx) {
  const bool quick = ctx.options.quick;
  const Fixture fx = make_fixture(quick ? 16 : 32, 20.0, 60.0, 0.25, 0.0);
  TrainConfig cfg = fixture_config(fx);
  cfg.hidden_width = 64;
  if (quick) {
    cfg.total_iters = 150;
    cfg.refine_at_iters = {50, 100};
  }
  const auto start = Clock::now();
  const Ensemble ens = train_ensemble(fx.stream, cfg, ctx.options.threads);
  const std::vector<double> times = uniform_times(fx.stream.t_start, fx.stream.t_end, 60.0);
  const LogVideo video = sample_video(ens.partitions, times, ctx.options.threads);
  const std::vector<Eigen::VectorXd> offsets = stitch_offsets(ens.partitions);
  const auto& parts = ens.partitions;

  auto rms = [](const Eigen::VectorXd& v) { return std::sqrt(v.squaredNorm() / static_cast<double>(v.size())); };
  auto in_overlap = [&](double t) {
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (t >= parts[i + 1].span_lo && t <= parts[i].span_hi) return true;
    }
    return false;
  };
  std::vector<double> steps;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (in_overlap(times[k]) || in_overlap(times[k + 1])) continue;
    const Eigen::Map<const Eigen::VectorXd> a(video.frames[k].data.data(), static_cast<Eigen::Index>(video.frames[k].size()));
    const Eigen::Map<const Eigen::VectorXd> b(video.frames[k + 1].data.data(), a.size());
    steps.push_back(rms(b - a));
  }
  std::sort(steps.begin(), steps.end());
  const double p95 = steps.empty() ? 0.0 : steps[static_cast<std::size_t>(0.95 * static_cast<double>(steps.size() - 1))];
  // Seam discontinuity: what a hard cut at the overlap centre would show
  // between the two offset-aligned neighbours.
  double seam = 0.0;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    const double mid = 0.5 * (parts[i + 1].span_lo + parts[i].span_hi);
    const Eigen::VectorXd left = parts[i].model.forward(parts[i].model.domain().normalize(mid)) + offsets[i];
    const Eigen::VectorXd right = parts[i + 1].model.forward(parts[i + 1].model.domain().normalize(mid)) + offsets[i + 1];
    seam = std::max(seam, rms(left - right));
  }
  const double secs = since(start);
  CriterionResult r;
  r.pass = parts.size() == 4 && seam < p95;
  r.detail = fmt("N = %zu partitions for %.2f s at tau = %g; worst seam discontinuity %.4f < p95 "
                 "frame-to-frame change %.4f (60 fps); %.1f s",
                 parts.size(), fx.stream.duration(), cfg.partition_tau, seam, p95, secs);
  return r;
}

CriterionResult tone_mapping(Context&) {
  const auto start = Clock::now();
  const std::uint8_t mid = quantize_unit(tone_map_value(0.0, 0.6));
  const double exact = std::pow(0.5, 0.6);
  std::size_t inversions = 0;
  std::size_t byte_inversions = 0;
  double prev = -1.0;
  int prev_byte = -1;
  constexpr int kN = 10000;
  for (int i = 0; i < kN; ++i) {
    const double l = -12.0 + 24.0 * i / (kN - 1);
    const double v = tone_map_value(l, 0.6);
    const int b = quantize_unit(v);
    if (!(v > prev)) ++inversions;
    if (b < prev_byte) ++byte_inversions;
    prev = v;
    prev_byte = b;
  }
  const double secs = since(start);
  CriterionResult r;
  r.pass = mid == 168 && std::abs(tone_map_value(0.0, 0.6) - exact) < 1e-12 && inversions == 0 &&
           byte_inversions == 0;
  r.detail = fmt("L=0, gamma=0.6 -> %.5f, byte %d (168); inversions over %d-point ramp: %zu real, %zu "
                 "byte; %.3f s", tone_map_value(0.0, 0.6), mid, kN, inversions, byte_inversions, secs);
  return r;
}

CriterionResult metric_sanity(Context&) {
  const auto start = Clock::now();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Frame a(32, 32);
  for (double& v : a.data) v = u(rng);
  const double self_ssim = ssim(a, a);
  const double self_mse = mse(a, a);
  const double ca = 0.3, cb = 0.7, c1 = 1e-4;
  Frame fa(16, 16), fb(16, 16);
  std::fill(fa.data.begin(), fa.data.end(), ca);
  std::fill(fb.data.begin(), fb.data.end(), cb);
  const double closed = (2 * ca * cb + c1) / (ca * ca + cb * cb + c1);
  const double got = ssim(fa, fb);
  const double secs = since(start);
  CriterionResult r;
  r.pass = std::abs(self_ssim - 1.0) <= 1e-9 && self_mse == 0.0 && std::abs(got - closed) <= 1e-9;
  r.detail = fmt("ssim(a,a) - 1 = %.1e, mse(a,a) = %g, constant SSIM %.12f vs closed form %.12f; %.3f s",
                 self_ssim - 1.0, self_mse, got, closed, secs);
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CriterionResult determinism(Context& ctx) {
  const bool quick = ctx.options.quick;
  const Fixture fx = make_fixture(32, quick ? 1.0 : 2.0, 120.0, 0.25, 0.0);
  TrainConfig cfg = fixture_config(fx);
  cfg.hidden_width = 64;
  cfg.partition_tau = quick ? 0.25 : 0.5;  // several partitions so training runs in parallel
  cfg.overlap = 0.1;
  if (quick) make_quick(cfg);
  cfg.hidden_width = 64;
  const auto start = Clock::now();
  std::vector<fs::path> dirs;
  for (int threads : {1, 4}) {
    ReconstructOptions opts;
    opts.train = cfg;
    opts.fps = 60.0;
    opts.threads = threads;
    const fs::path dir = ctx.work_dir / ("determinism_threads" + std::to_string(threads));
    fs::remove_all(dir);
    write_reconstruction(dir, reconstruct_stream(fx.stream, opts));
    dirs.push_back(dir);
  }
  const double secs = since(start);
  const std::vector<fs::path> a = list_pgm(dirs[0]);
  const std::vector<fs::path> b = list_pgm(dirs[1]);
  bool same = !a.empty() && a.size() == b.size() &&
              slurp(dirs[0] / "times.txt") == slurp(dirs[1] / "times.txt");
  for (std::size_t i = 0; same && i < a.size(); ++i) {
    same = a[i].filename() == b[i].filename() && slurp(a[i]) == slurp(b[i]);
  }
  const double budget = ctx.c1_seconds > 0.0 ? 2.0 * ctx.c1_seconds : (quick ? 30.0 : 240.0);
  CriterionResult r;
  r.pass = same && secs < budget;
  r.detail = fmt("%zu frames, threads 1 vs 4: %s; %.1f s (< %.1f s = 2x criterion 1)", a.size(),
                 same ? "byte-identical" : "DIFFER", secs, budget);
  return r;
}

struct Entry {
  int id;
  const char* name;
  CriterionResult (*run)(Context&);
};

constexpr Entry kCriteria[] = {
    {1, "closed-loop reconstruction fidelity", closed_loop},
    {2, "gradient and tangent oracle", gradient_oracle},
    {3, "event quantization", quantization},
    {4, "conservation under refinement", conservation},
    {5, "loss null-space", null_space},
    {6, "ablation direction", ablation},
    {7, "ensembling seams", ensembling},
    {8, "tone mapping", tone_mapping},
    {9, "metric sanity", metric_sanity},
    {10, "determinism across thread counts", determinism},
};

fs::path default_work_dir() {
  return fs::temp_directory_path() / ("eventinr-selftest-" + std::to_string(::getpid()));
}

}  // namespace

Fixture make_fixture(int size, double duration, double fps, double threshold_c,
                     double noise_rate, std::uint64_t seed) {
  Fixture fx;
  fx.threshold_c = threshold_c;
  fx.video = render_scene(SceneKind::kTranslatingGradient, size, size, duration, fps, seed);
  SimConfig sim;
  sim.threshold_c = threshold_c;
  sim.noise_rate = noise_rate;
  sim.rng_seed = seed + 6;
  fx.stream = simulate_events(fx.video, sim);
  fx.log_truth = log_frames(fx.video, sim.log_eps);
  return fx;
}

std::vector<CriterionResult> run_selftest(const SelftestOptions& options) {
  Context ctx{options, options.work_dir.empty() ? default_work_dir() : options.work_dir};
  fs::create_directories(ctx.work_dir);
  std::vector<CriterionResult> results;
  for (const Entry& e : kCriteria) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), e.id) == options.only.end()) {
      continue;
    }
    const auto start = Clock::now();
    CriterionResult r;
    try {
      r = e.run(ctx);
    } catch (const std::exception& ex) {
      r.pass = false;
      r.detail = std::string("error: ") + ex.what();
    }
    r.id = e.id;
    r.name = e.name;
    r.seconds = since(start);
    if (options.on_result) options.on_result(r);
    results.push_back(std::move(r));
  }
  if (options.work_dir.empty()) {
    std::error_code ec;
    fs::remove_all(ctx.work_dir, ec);
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  return fmt("%s  [%2d] %-36s %s", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str());
}

}  // namespace eventinr

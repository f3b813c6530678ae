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


// eventinr: simulate | reconstruct | enhance | evaluate | selftest.
//
// Exit codes: 0 success, 1 runtime error (or failed self-test), 2 usage error.
// Every run that gets past argument parsing writes a JSON manifest next to
// its outputs, including failed runs.

#include <unistd.h>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include "eventinr/error.hpp"
#include "eventinr/eval.hpp"
#include "eventinr/event_io.hpp"
#include "eventinr/image_io.hpp"
#include "eventinr/pipeline.hpp"
#include "eventinr/reconstruct.hpp"
#include "eventinr/selftest.hpp"
#include "eventinr/simulator.hpp"
#include "eventinr/trainer.hpp"

#ifndef EVENTINR_VERSION
#define EVENTINR_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace eventinr;

namespace {

struct Globals {
  int threads = 0;  // 0: available cores
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

int resolved_threads(const Globals& g) {
  if (g.threads > 0) return g.threads;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string require_out(const Globals& g, const char* what) {
  if (g.out.empty()) throw UsageError(std::string("--out is required (") + what + ")");
  return g.out;
}

json versions() {
  return {{"eventinr", EVENTINR_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__}};
}

json config_json(const TrainConfig& c) {
  return {{"lambda_reg", c.lambda_reg},       {"threshold_c", c.threshold_c},
          {"initial_bin", c.initial_bin},     {"initial_split", c.initial_split},
          {"stages", c.stages},               {"refine_at_iters", c.refine_at_iters},
          {"total_iters", c.total_iters},     {"lr", c.lr},
          {"lr_decay", c.lr_decay},           {"lr_decay_every", c.lr_decay_every},
          {"partition_tau", c.partition_tau}, {"overlap", c.overlap},
          {"batch_frames", c.batch_frames},   {"seed", c.seed},
          {"hidden_layers", c.hidden_layers}, {"hidden_width", c.hidden_width},
          {"omega0", c.omega0}};
}

std::string describe(const Error& e) {
  std::string msg = e.what();  // already "Kind: message"
  if (e.partition) msg += " (partition " + std::to_string(*e.partition) + ")";
  return msg;
}

// Collects provenance while a subcommand runs and writes it at the end.
class Manifest {
 public:
  Manifest(std::string subcommand, const std::vector<std::string>& argv, const Globals& g)
      : start_(std::chrono::steady_clock::now()) {
    doc_["subcommand"] = std::move(subcommand);
    doc_["argv"] = argv;
    doc_["seed"] = g.seed;
    doc_["threads"] = resolved_threads(g);
    doc_["versions"] = versions();
  }
  json& operator[](const char* key) { return doc_[key]; }
  void set_path(fs::path p) { path_ = std::move(p); }

  void write(int exit_code, const std::string& error) {
    if (path_.empty()) return;
    doc_["exit_code"] = exit_code;
    doc_["status"] = exit_code == 0 ? "ok" : "error";
    if (!error.empty()) doc_["error"] = error;
    doc_["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    try {
      if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
      write_file_atomic(path_, doc_.dump(2) + "\n");
    } catch (const std::exception& e) {
      std::fprintf(stderr, "eventinr: could not write manifest %s: %s\n", path_.c_str(), e.what());
    }
  }

 private:
  json doc_;
  fs::path path_;
  std::chrono::steady_clock::time_point start_;
};

std::pair<int, int> parse_size(const std::string& s) {
  static const std::regex re(R"((\d+)[xX](\d+))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw UsageError("--size expects WxH, got '" + s + "'");
  return {std::stoi(m[1]), std::stoi(m[2])};
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string scene = "translating_gradient";
  std::string size = "64x64";
  double duration = 2.0;
  double fps = 240.0;
  double threshold = 0.25;
  double noise = 0.0;
  double log_eps = 1e-3;
  std::string polarity = "signed";
  std::string dump_frames;
};

void cmd_simulate(const SimulateArgs& a, const Globals& g, Manifest& man) {
  const fs::path out = require_out(g, "events file");
  man.set_path(out.string() + ".manifest.json");
  const auto [w, h] = parse_size(a.size);
  const SceneKind kind = parse_scene_kind(a.scene);
  SimConfig sim;
  sim.threshold_c = a.threshold;
  sim.noise_rate = a.noise;
  sim.log_eps = a.log_eps;
  sim.rng_seed = g.seed;
  man["config"] = {{"scene", a.scene},       {"width", w},         {"height", h},
                   {"duration", a.duration}, {"fps", a.fps},       {"threshold_c", a.threshold},
                   {"noise_rate", a.noise},  {"log_eps", a.log_eps}, {"polarity", a.polarity}};
  man["outputs"] = {{"events", out.string()}};
  if (!a.dump_frames.empty()) man["outputs"]["frames"] = a.dump_frames;

  WriteOptions wo;
  wo.encoding = parse_polarity_encoding(a.polarity);
  wo.header = true;
  const IntensityVideo video = render_scene(kind, w, h, a.duration, a.fps, g.seed);
  const EventStream stream = simulate_events(video, sim);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_events_file(out, stream, wo);
  if (!a.dump_frames.empty()) dump_video(video, a.dump_frames);
  man["events"] = stream.size();
  man["frames"] = video.frames.size();
  std::printf("%zu events from %zu frames -> %s\n", stream.size(), video.frames.size(),
              out.c_str());
}

// ---------------------------------------------------------------------------
// reconstruct / enhance

struct TrainArgs {
  std::string events;
  std::string polarity = "signed";
  std::optional<int> width;
  std::optional<int> height;
  std::optional<double> lambda;
  std::optional<int> iters;
  std::optional<double> threshold;
  std::optional<double> partition_tau;
  std::optional<double> overlap;
  std::optional<int> hidden_width;
  std::optional<int> hidden_layers;
  std::optional<int> batch_frames;
};

struct ReconstructArgs {
  TrainArgs train;
  std::string timestamps;
  double gamma = 0.6;
  double fps = 30.0;
};

struct EnhanceArgs {
  TrainArgs train;
  std::string checkpoints;
  std::string timestamps;
  double window_dt = 0.01;
  double fps = 30.0;
  std::optional<double> scale;
};

void add_train_options(CLI::App* cmd, TrainArgs& a, bool events_required) {
  auto* ev = cmd->add_option("--events", a.events, "event text file (t x y p per line)");
  if (events_required) ev->required();
  cmd->add_option("--polarity", a.polarity, "polarity encoding: signed | zero_one")
      ->check(CLI::IsMember({"signed", "zero_one"}));
  cmd->add_option("--width", a.width, "sensor width (default: header or largest x + 1)");
  cmd->add_option("--height", a.height, "sensor height");
  cmd->add_option("--lambda", a.lambda, "spatial regularization weight");
  cmd->add_option("--iters", a.iters, "iterations per partition (refinement points scale along)");
  cmd->add_option("--threshold", a.threshold, "contrast threshold C");
  cmd->add_option("--partition-tau", a.partition_tau, "partition length in seconds");
  cmd->add_option("--overlap", a.overlap, "overlap between partitions in seconds");
  cmd->add_option("--hidden-width", a.hidden_width, "hidden layer width");
  cmd->add_option("--hidden-layers", a.hidden_layers, "number of hidden layers");
  cmd->add_option("--batch-frames", a.batch_frames, "event frames per iteration (0 = all)");
}

TrainConfig resolve_config(const TrainArgs& a, const Globals& g) {
  TrainConfig cfg;
  if (!g.config.empty()) cfg = read_train_config(g.config, cfg);
  cfg.seed = g.seed;
  if (a.lambda) cfg.lambda_reg = *a.lambda;
  if (a.threshold) cfg.threshold_c = *a.threshold;
  if (a.partition_tau) cfg.partition_tau = *a.partition_tau;
  if (a.overlap) cfg.overlap = *a.overlap;
  if (a.hidden_width) cfg.hidden_width = *a.hidden_width;
  if (a.hidden_layers) cfg.hidden_layers = *a.hidden_layers;
  if (a.batch_frames) cfg.batch_frames = *a.batch_frames;
  if (a.iters && *a.iters != cfg.total_iters) {
    for (int& r : cfg.refine_at_iters) {
      r = static_cast<int>(std::lround(static_cast<double>(r) * *a.iters / cfg.total_iters));
    }
    cfg.total_iters = *a.iters;
  }
  cfg.validate();
  return cfg;
}

EventStream load_stream(const TrainArgs& a) {
  ParseOptions po;
  po.encoding = parse_polarity_encoding(a.polarity);
  po.width = a.width;
  po.height = a.height;
  return read_events_file(a.events, po);
}

std::vector<double> frame_times(const std::string& timestamps, double lo, double hi, double fps) {
  return timestamps.empty() ? uniform_times(lo, hi, fps) : read_timestamps_file(timestamps);
}

void cmd_reconstruct(const ReconstructArgs& a, const Globals& g, Manifest& man) {
  const fs::path out = require_out(g, "output directory");
  man.set_path(out / "manifest.json");
  man["inputs"] = {{"events", a.train.events}, {"config", g.config}, {"timestamps", a.timestamps}};
  ReconstructOptions opts;
  opts.train = resolve_config(a.train, g);
  opts.tone.gamma = a.gamma;
  opts.fps = a.fps;
  opts.threads = resolved_threads(g);
  man["config"] = config_json(opts.train);
  man["tone"] = {{"gamma", a.gamma}, {"fps", a.fps}};
  const EventStream stream = load_stream(a.train);
  if (!a.timestamps.empty()) opts.times = read_timestamps_file(a.timestamps);
  const Reconstruction rec = reconstruct_stream(stream, opts);
  write_reconstruction(out, rec);
  man["outputs"] = {{"frames", rec.frames.size()},
                    {"partitions", rec.ensemble.partitions.size()},
                    {"directory", out.string()}};
  json losses = json::array();
  for (const TrainReport& r : rec.ensemble.reports) {
    losses.push_back({{"partition", r.partition},
                      {"final_total", r.history.empty() ? 0.0 : r.history.back().total},
                      {"final_T", r.final_resolution()},
                      {"seconds", r.seconds}});
  }
  man["training"] = losses;
  std::printf("%zu frames, %zu partitions -> %s\n", rec.frames.size(),
              rec.ensemble.partitions.size(), out.c_str());
}

// Rebuilds partitions from saved checkpoints; spans come from each model's
// time domain.
std::vector<Partition> load_partitions(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("partition_", 0) == 0 && entry.path().extension() == ".ckpt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorKind::kIo, "no partition_*.ckpt files in " + dir.string());
  std::vector<Partition> parts;
  for (const fs::path& f : files) {
    Partition p;
    p.index = static_cast<int>(parts.size());
    p.model = load_checkpoint(f);
    p.span_lo = p.core_lo = p.model.domain().lo;
    p.span_hi = p.core_hi = p.model.domain().hi;
    parts.push_back(std::move(p));
  }
  return parts;
}

void cmd_enhance(const EnhanceArgs& a, const Globals& g, Manifest& man) {
  const fs::path out = require_out(g, "output directory");
  man.set_path(out / "manifest.json");
  if (a.train.events.empty() == a.checkpoints.empty()) {
    throw UsageError("enhance needs exactly one of --events or --checkpoints");
  }
  man["inputs"] = {{"events", a.train.events}, {"checkpoints", a.checkpoints},
                   {"config", g.config}, {"timestamps", a.timestamps}};
  const TrainConfig cfg = resolve_config(a.train, g);
  std::vector<Partition> parts;
  if (!a.checkpoints.empty()) {
    parts = load_partitions(a.checkpoints);
  } else {
    man["config"] = config_json(cfg);
    parts = train_ensemble(load_stream(a.train), cfg, resolved_threads(g)).partitions;
  }
  const double scale = a.scale.value_or(cfg.threshold_c);
  man["enhance"] = {{"window_dt", a.window_dt}, {"scale", scale}, {"fps", a.fps}};
  const auto times = frame_times(a.timestamps, parts.front().span_lo, parts.back().span_hi, a.fps);
  const std::vector<Frame> frames = enhance_events(parts, times, a.window_dt, resolved_threads(g));
  std::vector<Image8> gray;
  gray.reserve(frames.size());
  for (const Frame& f : frames) gray.push_back(signed_to_gray(f, scale));
  write_frames(out, gray, times);
  man["outputs"] = {{"frames", gray.size()}, {"directory", out.string()}};
  std::printf("%zu enhanced frames -> %s\n", gray.size(), out.c_str());
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string pred;
  std::string ref;
  bool no_clahe = false;
};

void cmd_evaluate(const EvaluateArgs& a, const Globals& g, Manifest& man) {
  const fs::path out = require_out(g, "report CSV");
  man.set_path(out.string() + ".manifest.json");
  man["inputs"] = {{"pred", a.pred}, {"ref", a.ref}};
  man["clahe"] = !a.no_clahe;
  std::vector<Image8> pred, ref;
  for (const fs::path& p : list_pgm(a.pred)) pred.push_back(read_pgm(p));
  for (const fs::path& p : list_pgm(a.ref)) ref.push_back(read_pgm(p));
  if (pred.empty()) throw Error(ErrorKind::kIo, "no .pgm frames in " + a.pred);
  std::vector<double> times;
  if (fs::exists(fs::path(a.pred) / "times.txt")) times = read_timestamps_file(fs::path(a.pred) / "times.txt");
  const MetricReport report = evaluate_frames(pred, ref, !a.no_clahe);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_file_atomic(out, metric_csv(report, times));
  man["outputs"] = {{"report", out.string()}};
  man["mean_mse"] = report.mean_mse;
  man["mean_ssim"] = report.mean_ssim;
  std::printf("%zu frames: mean MSE %.6f, mean SSIM %.4f -> %s\n", report.frames, report.mean_mse,
              report.mean_ssim, out.c_str());
}

// ---------------------------------------------------------------------------
// selftest

struct SelftestArgs {
  bool quick = false;
  std::vector<int> only;
};

bool cmd_selftest(const SelftestArgs& a, const Globals& g, Manifest& man) {
  SelftestOptions opts;
  opts.quick = a.quick;
  opts.threads = resolved_threads(g);
  opts.only = a.only;
  fs::path out = g.out;
  if (out.empty()) {
    out = fs::temp_directory_path() / ("eventinr_selftest_" + std::to_string(::getpid()));
  }
  opts.work_dir = out / "work";
  man.set_path(out / "manifest.json");
  opts.on_result = [](const CriterionResult& r) {
    std::printf("%s\n", format_result(r).c_str());
    std::fflush(stdout);
  };
  const auto results = run_selftest(opts);
  int failed = 0;
  json rows = json::array();
  for (const auto& r : results) {
    failed += r.pass ? 0 : 1;
    rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail},
                    {"seconds", r.seconds}});
  }
  man["quick"] = a.quick;
  man["criteria"] = rows;
  man["failed"] = failed;
  std::printf("%d of %zu criteria failed; manifest %s\n", failed, results.size(),
              (out / "manifest.json").c_str());
  return failed == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-to-video reconstruction with implicit neural representations", "eventinr"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", EVENTINR_VERSION);
  Globals g;
  app.add_option("--threads", g.threads, "worker threads (default: available cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out", g.out, "output file or directory");
  app.add_option("--config", g.config, "training config file (key = value lines)");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "render a synthetic scene and simulate its events");
  c_sim->add_option("--scene", sim.scene, "translating_gradient | moving_checker | rotating_bars");
  c_sim->add_option("--size", sim.size, "WxH");
  c_sim->add_option("--duration", sim.duration, "seconds");
  c_sim->add_option("--fps", sim.fps, "frame rate of the rendered video");
  c_sim->add_option("--threshold", sim.threshold, "contrast threshold C");
  c_sim->add_option("--noise", sim.noise, "spurious events per pixel per second");
  c_sim->add_option("--log-eps", sim.log_eps, "epsilon in log(I + eps)");
  c_sim->add_option("--polarity", sim.polarity, "output encoding: signed | zero_one")
      ->check(CLI::IsMember({"signed", "zero_one"}));
  c_sim->add_option("--dump-frames", sim.dump_frames, "also write the rendered frames here");

  ReconstructArgs rec;
  auto* c_rec = app.add_subcommand("reconstruct", "train on an event file and write video frames");
  add_train_options(c_rec, rec.train, true);
  c_rec->add_option("--timestamps", rec.timestamps, "frame times file (default: uniform at --fps)");
  c_rec->add_option("--gamma", rec.gamma, "tone-mapping gamma");
  c_rec->add_option("--fps", rec.fps, "output frame rate when no timestamps are given");

  EnhanceArgs enh;
  auto* c_enh = app.add_subcommand("enhance", "write denoised event frames from the learned derivative");
  add_train_options(c_enh, enh.train, false);
  c_enh->add_option("--checkpoints", enh.checkpoints, "reuse partition_*.ckpt from a reconstruct run");
  c_enh->add_option("--timestamps", enh.timestamps, "frame times file");
  c_enh->add_option("--window-dt", enh.window_dt, "event window in seconds");
  c_enh->add_option("--fps", enh.fps, "output frame rate when no timestamps are given");
  c_enh->add_option("--scale", enh.scale, "log change mapped to full gray swing (default: C)");

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "per-frame MSE and SSIM between two frame folders");
  c_ev->add_option("--pred", ev.pred, "predicted frames (.pgm)")->required();
  c_ev->add_option("--ref", ev.ref, "reference frames (.pgm)")->required();
  c_ev->add_flag("--no-clahe", ev.no_clahe, "compare without CLAHE");

  SelftestArgs st;
  auto* c_st = app.add_subcommand("selftest", "run the closed-loop acceptance criteria");
  c_st->add_flag("--quick", st.quick, "smaller fixtures and relaxed thresholds");
  c_st->add_option("--only", st.only, "run only these criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* cmd = app.get_subcommands().front();
  std::vector<std::string> args(argv, argv + argc);
  Manifest man(cmd->get_name(), args, g);
  int code = 0;
  std::string error;
  try {
    if (cmd == c_sim) {
      cmd_simulate(sim, g, man);
    } else if (cmd == c_rec) {
      cmd_reconstruct(rec, g, man);
    } else if (cmd == c_enh) {
      cmd_enhance(enh, g, man);
    } else if (cmd == c_ev) {
      cmd_evaluate(ev, g, man);
    } else if (cmd == c_st) {
      code = cmd_selftest(st, g, man) ? 0 : 1;
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "eventinr %s: %s\nRun with --help for usage.\n", cmd->get_name().c_str(), e.what());
    return 2;
  } catch (const Error& e) {
    error = describe(e);
    code = 1;
  } catch (const std::exception& e) {
    error = e.what();
    code = 1;
  }
  if (!error.empty()) std::fprintf(stderr, "eventinr %s: %s\n", cmd->get_name().c_str(), error.c_str());
  man.write(code, error);
  return code;
}

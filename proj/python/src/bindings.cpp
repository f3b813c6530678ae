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


// Python bindings: simulation, reconstruction, metrics and tone mapping on
// NumPy arrays. Frames are (H, W) float64 arrays; videos are (K, H, W).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstring>
#include <string>
#include <vector>

#include "eventinr/error.hpp"
#include "eventinr/eval.hpp"
#include "eventinr/event_frames.hpp"
#include "eventinr/event_io.hpp"
#include "eventinr/pipeline.hpp"
#include "eventinr/reconstruct.hpp"
#include "eventinr/simulator.hpp"
#include "eventinr/trainer.hpp"

namespace py = pybind11;
using namespace eventinr;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ByteArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

template <class T>
py::array_t<T> video_array(const std::vector<Grid<T>>& frames, int height, int width) {
  py::array_t<T> out({static_cast<py::ssize_t>(frames.size()), static_cast<py::ssize_t>(height),
                      static_cast<py::ssize_t>(width)});
  T* dst = out.mutable_data();
  for (const auto& f : frames) dst = std::copy(f.data.begin(), f.data.end(), dst);
  return out;
}

template <class T>
py::array_t<T> frame_array(const Grid<T>& f) {
  py::array_t<T> out({static_cast<py::ssize_t>(f.height), static_cast<py::ssize_t>(f.width)});
  std::copy(f.data.begin(), f.data.end(), out.mutable_data());
  return out;
}

template <class T, class A>
Grid<T> to_grid(const A& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  Grid<T> g(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::memcpy(g.data.data(), a.data(), g.size() * sizeof(T));
  return g;
}

template <class T, class A>
std::vector<Grid<T>> to_grids(const A& a) {
  if (a.ndim() != 3) throw py::value_error("expected a 3-D array (frames, height, width)");
  const auto h = static_cast<int>(a.shape(1));
  const auto w = static_cast<int>(a.shape(2));
  std::vector<Grid<T>> out;
  const T* src = a.data();
  for (py::ssize_t k = 0; k < a.shape(0); ++k) {
    Grid<T> g(h, w);
    std::copy(src, src + g.size(), g.data.begin());
    src += g.size();
    out.push_back(std::move(g));
  }
  return out;
}

py::array_t<double> vector_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

// (N, 4) array of t, x, y, polarity.
py::array_t<double> events_array(const EventStream& s) {
  py::array_t<double> out({static_cast<py::ssize_t>(s.size()), py::ssize_t{4}});
  double* d = out.mutable_data();
  for (const Event& e : s.events) {
    *d++ = e.t;
    *d++ = e.x;
    *d++ = e.y;
    *d++ = e.polarity;
  }
  return out;
}

EventStream stream_from_array(const DoubleArray& events, int width, int height, double t_start,
                              double t_end) {
  if (events.ndim() != 2 || events.shape(1) != 4) throw py::value_error("events must be (N, 4)");
  EventStream s;
  s.width = width;
  s.height = height;
  s.t_start = t_start;
  s.t_end = t_end;
  const double* d = events.data();
  for (py::ssize_t i = 0; i < events.shape(0); ++i, d += 4) {
    s.events.push_back({d[0], static_cast<int>(d[1]), static_cast<int>(d[2]), static_cast<int>(d[3])});
  }
  s.validate();
  return s;
}

IntensityVideo video_from_arrays(const DoubleArray& times, const DoubleArray& frames) {
  IntensityVideo v;
  v.frames = to_grids<double>(frames);
  if (times.ndim() != 1 || static_cast<std::size_t>(times.shape(0)) != v.frames.size()) {
    throw py::value_error("times must be 1-D with one entry per frame");
  }
  v.times.assign(times.data(), times.data() + times.shape(0));
  v.height = v.frames.empty() ? 0 : v.frames.front().height;
  v.width = v.frames.empty() ? 0 : v.frames.front().width;
  return v;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Event-to-video reconstruction with implicit neural representations";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<EventStream>(m, "EventStream")
      .def(py::init(&stream_from_array), py::arg("events"), py::arg("width"), py::arg("height"),
           py::arg("t_start"), py::arg("t_end"),
           "Build from an (N, 4) array of t, x, y, polarity (+1/-1), sorted by t.")
      .def_readonly("width", &EventStream::width)
      .def_readonly("height", &EventStream::height)
      .def_readonly("t_start", &EventStream::t_start)
      .def_readonly("t_end", &EventStream::t_end)
      .def("__len__", &EventStream::size)
      .def_property_readonly("events", &events_array, "(N, 4) array of t, x, y, polarity")
      .def("slice", &EventStream::slice, py::arg("lo"), py::arg("hi"))
      .def("__repr__", [](const EventStream& s) {
        return "<EventStream " + std::to_string(s.size()) + " events, " + std::to_string(s.width) +
               "x" + std::to_string(s.height) + ">";
      });

  m.def(
      "read_events",
      [](const std::string& path, const std::string& polarity) {
        ParseOptions po;
        po.encoding = parse_polarity_encoding(polarity);
        return read_events_file(path, po);
      },
      py::arg("path"), py::arg("polarity") = "signed");
  m.def(
      "write_events",
      [](const std::string& path, const EventStream& s, const std::string& polarity) {
        WriteOptions wo;
        wo.encoding = parse_polarity_encoding(polarity);
        wo.header = true;
        write_events_file(path, s, wo);
      },
      py::arg("path"), py::arg("stream"), py::arg("polarity") = "signed");

  m.def(
      "render_scene",
      [](const std::string& scene, int width, int height, double duration, double fps,
         std::uint64_t seed) {
        const IntensityVideo v = render_scene(parse_scene_kind(scene), width, height, duration, fps, seed);
        return py::make_tuple(vector_array(v.times), video_array(v.frames, v.height, v.width));
      },
      py::arg("scene") = "translating_gradient", py::arg("width") = 64, py::arg("height") = 64,
      py::arg("duration") = 2.0, py::arg("fps") = 240.0, py::arg("seed") = 0,
      "Returns (times, intensities) with intensities shaped (K, H, W) in [0.05, 1].");

  m.def(
      "simulate_events",
      [](const DoubleArray& times, const DoubleArray& frames, double threshold, double noise_rate,
         std::uint64_t seed, double log_eps) {
        SimConfig cfg;
        cfg.threshold_c = threshold;
        cfg.noise_rate = noise_rate;
        cfg.rng_seed = seed;
        cfg.log_eps = log_eps;
        return simulate_events(video_from_arrays(times, frames), cfg);
      },
      py::arg("times"), py::arg("frames"), py::arg("threshold") = 0.25, py::arg("noise_rate") = 0.0,
      py::arg("seed") = 0, py::arg("log_eps") = 1e-3);

  m.def(
      "stack_events",
      [](const EventStream& s, double bin_duration, double threshold) {
        const EventFrameStack st = stack_uniform(s, bin_duration, threshold);
        std::vector<double> edges;
        for (const Interval& iv : st.intervals) edges.push_back(iv.start);
        edges.push_back(st.t_end());
        return py::make_tuple(vector_array(edges), video_array(st.frames, st.height, st.width));
      },
      py::arg("stream"), py::arg("bin_duration"), py::arg("threshold") = 1.0,
      "Returns (edges, frames): T+1 bin edges and (T, H, W) accumulated log change.");

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("lambda_reg", &TrainConfig::lambda_reg)
      .def_readwrite("threshold_c", &TrainConfig::threshold_c)
      .def_readwrite("initial_bin", &TrainConfig::initial_bin)
      .def_readwrite("stages", &TrainConfig::stages)
      .def_readwrite("refine_at_iters", &TrainConfig::refine_at_iters)
      .def_readwrite("total_iters", &TrainConfig::total_iters)
      .def_readwrite("lr", &TrainConfig::lr)
      .def_readwrite("lr_decay", &TrainConfig::lr_decay)
      .def_readwrite("lr_decay_every", &TrainConfig::lr_decay_every)
      .def_readwrite("partition_tau", &TrainConfig::partition_tau)
      .def_readwrite("overlap", &TrainConfig::overlap)
      .def_readwrite("batch_frames", &TrainConfig::batch_frames)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("hidden_layers", &TrainConfig::hidden_layers)
      .def_readwrite("hidden_width", &TrainConfig::hidden_width)
      .def_readwrite("omega0", &TrainConfig::omega0)
      .def("validate", &TrainConfig::validate)
      .def_static("parse", [](const std::string& text) { return parse_train_config(text); })
      .def("to_text", &format_train_config)
      .def("__repr__", &format_train_config);

  m.def(
      "reconstruct",
      [](const EventStream& stream, const TrainConfig& config, std::optional<DoubleArray> times,
         double fps, double gamma, int threads) {
        ReconstructOptions opts;
        opts.train = config;
        opts.tone.gamma = gamma;
        opts.fps = fps;
        opts.threads = threads;
        if (times) opts.times.assign(times->data(), times->data() + times->size());
        Reconstruction rec;
        {
          py::gil_scoped_release release;
          rec = reconstruct_stream(stream, opts);
        }
        py::list losses;
        for (const TrainReport& r : rec.ensemble.reports) {
          std::vector<double> total;
          for (const LossValue& l : r.history) total.push_back(l.total);
          losses.append(vector_array(total));
        }
        py::dict out;
        out["times"] = vector_array(rec.video.times);
        out["log_video"] = video_array(rec.video.frames, rec.video.height, rec.video.width);
        out["frames"] = video_array(rec.frames, rec.video.height, rec.video.width);
        out["losses"] = losses;
        out["partitions"] = rec.ensemble.partitions.size();
        return out;
      },
      py::arg("stream"), py::arg("config") = TrainConfig{}, py::arg("times") = py::none(),
      py::arg("fps") = 30.0, py::arg("gamma") = 0.6, py::arg("threads") = 1,
      "Train on `stream` and return a dict with times, log_video (anchored, (K, H, W)), "
      "frames (uint8, tone-mapped), per-partition loss histories and the partition count.");

  m.def(
      "tone_map",
      [](const DoubleArray& log_video, double gamma) {
        LogVideo v;
        v.frames = to_grids<double>(log_video);
        v.height = static_cast<int>(log_video.shape(1));
        v.width = static_cast<int>(log_video.shape(2));
        return video_array(tone_map(v, {gamma}), v.height, v.width);
      },
      py::arg("log_video"), py::arg("gamma") = 0.6);

  m.def(
      "anchor",
      [](const DoubleArray& log_video) {
        LogVideo v;
        v.frames = to_grids<double>(log_video);
        v.height = static_cast<int>(log_video.shape(1));
        v.width = static_cast<int>(log_video.shape(2));
        return video_array(anchor_offset(std::move(v)).frames, v.height, v.width);
      },
      py::arg("log_video"), "Subtract the median of all values.");

  m.def(
      "mse", [](const DoubleArray& a, const DoubleArray& b) { return mse(to_grid<double>(a), to_grid<double>(b)); },
      py::arg("pred"), py::arg("ref"));
  m.def(
      "ssim", [](const DoubleArray& a, const DoubleArray& b) { return ssim(to_grid<double>(a), to_grid<double>(b)); },
      py::arg("pred"), py::arg("ref"), "Single-scale SSIM for values in [0, 1].");
  m.def(
      "clahe",
      [](const ByteArray& img, int tiles, double clip_limit) {
        ClaheConfig cfg;
        cfg.tiles_x = cfg.tiles_y = tiles;
        cfg.clip_limit = clip_limit;
        return frame_array(clahe(to_grid<std::uint8_t>(img), cfg));
      },
      py::arg("image"), py::arg("tiles") = 8, py::arg("clip_limit") = 2.0);
}

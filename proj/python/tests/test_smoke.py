# Copyright 2026 The eventinr Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import numpy as np
import pytest

import eventinr as ei


def small_stream(size=16, duration=1.0, fps=60.0, threshold=0.25):
    times, video = ei.render_scene("translating_gradient", size, size, duration, fps, seed=1)
    return times, video, ei.simulate_events(times, video, threshold=threshold)


def test_render_scene_shape_and_range():
    times, video = ei.render_scene("moving_checker", 24, 16, duration=0.5, fps=40.0, seed=3)
    assert video.shape == (20, 16, 24)
    assert times.shape == (20,)
    assert video.min() >= 0.05 and video.max() <= 1.0


def test_ramp_events():
    times = np.array([0.0, 1.0])
    frames = np.exp(np.array([0.0, 1.0])).reshape(2, 1, 1)
    s = ei.simulate_events(times, frames, threshold=0.25, log_eps=0.0)
    ev = s.events
    assert len(s) == 4
    np.testing.assert_allclose(ev[:, 0], [0.25, 0.5, 0.75, 1.0], atol=1e-12)
    assert (ev[:, 3] == 1).all()


def test_event_quantization_bound():
    times, video, s = small_stream()
    counts = np.zeros(video.shape[1:])
    ev = s.events
    np.add.at(counts, (ev[:, 2].astype(int), ev[:, 1].astype(int)), ev[:, 3])
    change = np.log(video[-1] + 1e-3) - np.log(video[0] + 1e-3)
    assert np.abs(0.25 * counts - change).max() < 0.25


def test_stack_matches_counts():
    s = ei.EventStream(
        np.array([[0.1, 0, 0, 1], [0.2, 0, 0, 1], [0.9, 0, 0, -1]]), width=2, height=1,
        t_start=0.0, t_end=1.0)
    edges, frames = ei.stack_events(s, 0.5, threshold=0.25)
    np.testing.assert_allclose(edges, [0.0, 0.5, 1.0])
    assert frames[0, 0, 0] == 0.5 and frames[1, 0, 0] == -0.25
    assert frames[:, 0, 1].tolist() == [0.0, 0.0]


def test_event_file_round_trip(tmp_path):
    _, _, s = small_stream(size=8, duration=0.5)
    path = tmp_path / "ev.txt"
    ei.write_events(str(path), s)
    back = ei.read_events(str(path))
    assert len(back) == len(s)
    assert (back.width, back.height) == (8, 8)
    # Times are stored with nanosecond resolution.
    assert back.t_start == pytest.approx(s.t_start, abs=1e-9)
    assert back.t_end == pytest.approx(s.t_end, abs=1e-9)
    np.testing.assert_allclose(back.events, s.events, atol=1e-9)


def test_errors_are_raised():
    with pytest.raises(ei.Error):
        ei.render_scene("translating_gradient", 0, 0, 1.0, 30.0)
    with pytest.raises(ei.Error):
        ei.EventStream(np.array([[0.5, 9, 0, 1]]), width=2, height=2, t_start=0.0, t_end=1.0)
    with pytest.raises(ValueError):
        ei.EventStream(np.zeros((3, 3)), width=2, height=2, t_start=0.0, t_end=1.0)


def test_config_round_trip():
    cfg = ei.TrainConfig()
    assert cfg.lambda_reg == 0.05 and cfg.total_iters == 300
    cfg.hidden_width = 64
    cfg.refine_at_iters = [10, 20]
    cfg.total_iters = 30
    back = ei.TrainConfig.parse(cfg.to_text())
    assert back.hidden_width == 64 and back.refine_at_iters == [10, 20]
    bad = ei.TrainConfig()
    bad.lambda_reg = -1.0
    with pytest.raises(ei.Error):
        bad.validate()


def test_reconstruct_is_deterministic_and_tracks_the_scene():
    times, video, s = small_stream()
    cfg = ei.TrainConfig()
    cfg.threshold_c = 0.25
    cfg.hidden_width = 32
    cfg.total_iters = 60
    cfg.refine_at_iters = [20, 40]
    cfg.seed = 4
    a = ei.reconstruct(s, cfg, times=times, threads=1)
    b = ei.reconstruct(s, cfg, times=times, threads=2)
    assert a["frames"].dtype == np.uint8
    assert a["frames"].shape == video.shape
    assert a["partitions"] == 1
    np.testing.assert_array_equal(a["frames"], b["frames"])
    losses = a["losses"][0]
    assert losses.shape == (60,) and np.isfinite(losses).all()
    # Per-frame mean-aligned log error beats predicting a static frame.
    truth = np.log(video + 1e-3)
    pred = a["log_video"]
    def err(p):
        d = (p - p.mean(axis=(1, 2), keepdims=True)) - (truth - truth.mean(axis=(1, 2), keepdims=True))
        return (d ** 2).mean()
    assert err(pred) < err(np.zeros_like(pred))


def test_metrics_and_tone_map():
    a = np.linspace(0, 1, 16 * 16).reshape(16, 16)
    assert ei.mse(a, a) == 0.0
    assert ei.mse(np.zeros((4, 4)), np.full((4, 4), 0.5)) == 0.25
    assert ei.ssim(a, a) == pytest.approx(1.0, abs=1e-9)
    zero = np.zeros((1, 2, 2))
    assert (ei.tone_map(zero, 0.6) == 168).all()
    assert (ei.tone_map(zero, 1.0) == 128).all()
    np.testing.assert_array_equal(ei.anchor(np.full((2, 2, 2), 3.7)), 0.0)
    flat = np.full((32, 32), 77, dtype=np.uint8)
    assert np.abs(ei.clahe(flat).astype(int) - 77).max() <= 1

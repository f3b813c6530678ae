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

"""Event-to-video reconstruction with implicit neural representations."""

from ._core import (
    Error,
    EventStream,
    TrainConfig,
    anchor,
    clahe,
    mse,
    read_events,
    reconstruct,
    render_scene,
    simulate_events,
    ssim,
    stack_events,
    tone_map,
    write_events,
)

__version__ = "0.1.0"

__all__ = [
    "Error",
    "EventStream",
    "TrainConfig",
    "anchor",
    "clahe",
    "mse",
    "read_events",
    "reconstruct",
    "render_scene",
    "simulate_events",
    "ssim",
    "stack_events",
    "tone_map",
    "write_events",
]

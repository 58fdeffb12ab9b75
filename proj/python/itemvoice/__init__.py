# Copyright 2026 The itemvoice Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Speech-based per-item depression assessment."""

from itemvoice._core import (
    __version__,
    adam_defaults,
    cnn_window_count,
    f_scores,
    generate_synth_corpus,
    hard_vote,
    load_wav,
    log_mel,
    predict_wav,
    ramp_color,
    scale_items,
    segment_count,
    soft_vote,
)

__all__ = [
    "__version__",
    "adam_defaults",
    "cnn_window_count",
    "f_scores",
    "generate_synth_corpus",
    "hard_vote",
    "load_wav",
    "log_mel",
    "predict_wav",
    "ramp_color",
    "scale_items",
    "segment_count",
    "soft_vote",
]

# Copyright 2026 The Selective Learning Authors
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Selective learning for time series forecasting."""

import json

from selective_learning._core import (
    Error,
    anomaly_mask,
    anomaly_scores,
    entropy_of_variance,
    n_expected,
    resolve_config,
    run_cli,
    selective_loss,
    synth_clean,
    theorem1_bound,
    uncertainty_thresholds,
)
from selective_learning._core import train as _train

__all__ = [
    "Error",
    "anomaly_mask",
    "anomaly_scores",
    "entropy_of_variance",
    "n_expected",
    "resolve_config",
    "run_cli",
    "selective_loss",
    "synth_clean",
    "theorem1_bound",
    "train",
    "uncertainty_thresholds",
]


def train(config=None):
    """Trains from a config dict or JSON string and returns the history."""
    if config is None:
        config = {}
    if not isinstance(config, str):
        config = json.dumps(config)
    return _train(config)

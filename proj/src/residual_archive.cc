// Copyright 2026 The Selective Learning Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sl/residual_archive.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sl/errors.h"
#include "sl/time_series.h"

namespace sl {

std::size_t NExpected(std::size_t t, std::size_t lookback,
                      std::size_t horizon) {
  if (t < lookback) {
    throw ContractError("timestep precedes the first predictable index");
  }
  return std::min(t - lookback + 1, horizon);
}

double EntropyOfVariance(double variance) {
  if (variance < 0.0 || std::isnan(variance)) {
    throw ContractError("variance must be non-negative");
  }
  if (variance == 0.0) return -std::numeric_limits<double>::infinity();
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * variance);
}

double Entropy(const ResidualStats& stats) {
  return EntropyOfVariance(stats.variance);
}

ResidualArchive::ResidualArchive(std::size_t segment_length,
                                 std::size_t channels, std::size_t lookback,
                                 std::size_t horizon)
    : length_(segment_length),
      channels_(channels),
      lookback_(lookback),
      horizon_(horizon),
      data_(segment_length * channels * horizon, 0.0),
      head_(segment_length * channels, 0),
      count_(segment_length * channels, 0) {
  if (channels == 0 || lookback == 0 || horizon == 0) {
    throw ContractError("archive needs positive channels, lookback, horizon");
  }
}

std::size_t ResidualArchive::Capacity(std::size_t t) const {
  return TargetCoverage(t, length_, lookback_, horizon_);
}

void ResidualArchive::CheckKey(std::size_t t, std::size_t channel) const {
  if (t >= length_ || channel >= channels_) {
    throw ContractError("archive key out of range");
  }
}

std::size_t ResidualArchive::Count(std::size_t t, std::size_t channel) const {
  CheckKey(t, channel);
  return count_[Slot(t, channel)];
}

void ResidualArchive::Record(std::size_t t, std::size_t channel,
                             double residual) {
  CheckKey(t, channel);
  if (!std::isfinite(residual)) {
    throw NumericError("non-finite residual at t=" + std::to_string(t));
  }
  const std::size_t cap = Capacity(t);
  if (cap == 0) throw ContractError("timestep is never predicted");
  const std::size_t slot = Slot(t, channel);
  data_[slot * horizon_ + head_[slot]] = residual;
  head_[slot] = (head_[slot] + 1) % cap;
  if (count_[slot] < cap) ++count_[slot];
}

std::vector<double> ResidualArchive::Contents(std::size_t t,
                                              std::size_t channel) const {
  CheckKey(t, channel);
  const std::size_t slot = Slot(t, channel);
  const std::size_t n = count_[slot];
  const std::size_t cap = Capacity(t);
  std::vector<double> out(n);
  // When full, the oldest entry sits at head; otherwise at 0.
  const std::size_t start = n == cap ? head_[slot] : 0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = data_[slot * horizon_ + (start + i) % cap];
  }
  return out;
}

std::optional<ResidualStats> ResidualArchive::Variance(
    std::size_t t, std::size_t channel) const {
  CheckKey(t, channel);
  const std::size_t slot = Slot(t, channel);
  const std::size_t n = count_[slot];
  if (n < 2) return std::nullopt;
  const double* buf = data_.data() + slot * horizon_;
  // Buffer order does not matter for the statistics; summing over raw ring
  // slots keeps this loop branch-free.
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += buf[i];
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = buf[i] - mean;
    sq += d * d;
  }
  return ResidualStats{mean, sq / static_cast<double>(n), n};
}

double ResidualArchive::MaxAbsResidual() const {
  double out = 0.0;
  for (std::size_t slot = 0; slot < count_.size(); ++slot) {
    const double* buf = data_.data() + slot * horizon_;
    for (std::size_t i = 0; i < count_[slot]; ++i) {
      out = std::max(out, std::abs(buf[i]));
    }
  }
  return out;
}

void ResidualArchive::Clear() {
  std::fill(head_.begin(), head_.end(), 0);
  std::fill(count_.begin(), count_.end(), 0);
}

}  // namespace sl

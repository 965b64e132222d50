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

// Multivariate series container, CSV ingestion, chronological splitting,
// z-score normalization and stride-1 sliding windows.

#ifndef SL_TIME_SERIES_H_
#define SL_TIME_SERIES_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "sl/grid.h"

namespace sl {

// T x N matrix of finite observations on a fixed, unitless sampling grid.
class TimeSeries {
 public:
  TimeSeries() = default;
  // Throws ContractError unless T >= 1, N >= 1, every value is finite and
  // there is one name per channel. Empty names get "c<index>".
  TimeSeries(Matrix values, std::vector<std::string> channel_names = {});

  std::size_t length() const { return values_.rows(); }
  std::size_t channels() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  const std::vector<std::string>& channel_names() const {
    return channel_names_;
  }
  double operator()(std::size_t t, std::size_t c) const {
    return values_(t, c);
  }

  // Rows [begin, end) as a new series. Empty ranges are rejected.
  TimeSeries Slice(std::size_t begin, std::size_t end) const;

 private:
  Matrix values_;
  std::vector<std::string> channel_names_;
};

TimeSeries LoadCsv(const std::filesystem::path& path);
TimeSeries ParseCsv(std::istream& in);
void WriteCsv(const std::filesystem::path& path, const TimeSeries& series);

struct SplitSpec {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;

  // Throws ValidationError when ratios are negative, train is zero, or the
  // sum is not 1 within 1e-9.
  void Validate() const;
};

// Lengths are floor(T * cumulative ratio); the remainder lands in test.
std::array<std::size_t, 3> SplitLengths(std::size_t length,
                                        const SplitSpec& spec);

struct Segments {
  TimeSeries train;
  TimeSeries val;
  TimeSeries test;
};

// Segments with zero length are returned as default-constructed series.
Segments ChronologicalSplit(const TimeSeries& series, const SplitSpec& spec);

struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;
};

// Population statistics; a channel with zero spread gets std = 1.
NormStats FitNormalizer(const TimeSeries& train_segment);
TimeSeries ApplyNormalizer(const TimeSeries& series, const NormStats& stats);
TimeSeries InvertNormalizer(const TimeSeries& series, const NormStats& stats);

// A window never owns data; it indexes into a segment.
struct WindowSample {
  std::size_t origin = 0;
  std::size_t lookback = 0;
  std::size_t horizon = 0;

  std::size_t input_begin() const { return origin - lookback; }
  std::size_t target_end() const { return origin + horizon; }
};

// Origins L .. T-F, stride 1. Throws SizingError if T < L + F.
std::vector<WindowSample> MakeWindows(std::size_t segment_length,
                                      std::size_t lookback,
                                      std::size_t horizon);
std::vector<WindowSample> MakeWindows(const TimeSeries& segment,
                                      std::size_t lookback,
                                      std::size_t horizon);

// How many stride-1 windows place timestep u inside their target range.
std::size_t TargetCoverage(std::size_t u, std::size_t segment_length,
                           std::size_t lookback, std::size_t horizon);

// Window input rows [t-L, t) and target rows [t, t+F), copied out.
Matrix WindowInput(const TimeSeries& segment, const WindowSample& w);
Matrix WindowTarget(const TimeSeries& segment, const WindowSample& w);

// Channel-major copy of a segment so that a window's per-channel input and
// target are contiguous spans. Built once per segment for the hot paths.
class ChannelMajorSeries {
 public:
  ChannelMajorSeries() = default;
  explicit ChannelMajorSeries(const TimeSeries& series);

  std::size_t length() const { return length_; }
  std::size_t channels() const { return channels_; }

  std::span<const double> Channel(std::size_t c) const {
    return {data_.data() + c * length_, length_};
  }
  std::span<const double> Input(const WindowSample& w, std::size_t c) const {
    return Channel(c).subspan(w.input_begin(), w.lookback);
  }
  std::span<const double> Target(const WindowSample& w, std::size_t c) const {
    return Channel(c).subspan(w.origin, w.horizon);
  }

 private:
  std::size_t length_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

}  // namespace sl

#endif  // SL_TIME_SERIES_H_

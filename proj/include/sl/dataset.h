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

#ifndef SL_DATASET_H_
#define SL_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "sl/synthetic.h"
#include "sl/time_series.h"

namespace sl {

// A normalized segment with its stride-1 windows, frozen after construction.
class WindowedSegment {
 public:
  WindowedSegment() = default;
  // Throws SizingError when 0 < length < L + F. A zero-length segment (an
  // empty split) yields no windows.
  WindowedSegment(TimeSeries series, std::size_t lookback, std::size_t horizon,
                  LabelMatrix labels = {});

  bool empty() const { return windows_.empty(); }
  std::size_t lookback() const { return lookback_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t channels() const { return columns_.channels(); }
  std::size_t length() const { return columns_.length(); }

  const TimeSeries& series() const { return series_; }
  const ChannelMajorSeries& columns() const { return columns_; }
  const std::vector<WindowSample>& windows() const { return windows_; }
  // Empty when no ground-truth corruption labels are known.
  const LabelMatrix& labels() const { return labels_; }

 private:
  TimeSeries series_;
  ChannelMajorSeries columns_;
  std::vector<WindowSample> windows_;
  LabelMatrix labels_;
  std::size_t lookback_ = 0;
  std::size_t horizon_ = 0;
};

struct DataConfig {
  std::optional<std::filesystem::path> csv_path;
  std::optional<SynthConfig> synth;
  std::optional<CorruptionSpec> corruption;
  SplitSpec split;
  std::size_t lookback = 48;
  std::size_t horizon = 24;

  void Validate() const;
};

struct RawData {
  TimeSeries series;
  LabelMatrix labels;  // empty for CSV input
};

// CSV if csv_path is set, otherwise the synthetic generator; corruption is
// applied on top when configured.
RawData LoadRawData(const DataConfig& config);

struct PreparedData {
  NormStats stats;  // fitted on the train segment only
  WindowedSegment train;
  WindowedSegment val;
  WindowedSegment test;
};

PreparedData PrepareData(const RawData& raw, const DataConfig& config);
PreparedData PrepareData(const DataConfig& config);

}  // namespace sl

#endif  // SL_DATASET_H_

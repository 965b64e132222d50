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

#include "sl/dataset.h"

namespace sl {

WindowedSegment::WindowedSegment(TimeSeries series, std::size_t lookback,
                                 std::size_t horizon, LabelMatrix labels)
    : series_(std::move(series)),
      labels_(std::move(labels)),
      lookback_(lookback),
      horizon_(horizon) {
  if (series_.length() == 0) return;
  if (!labels_.empty() && (labels_.rows() != series_.length() ||
                           labels_.cols() != series_.channels())) {
    throw ContractError("label matrix does not match segment shape");
  }
  columns_ = ChannelMajorSeries(series_);
  windows_ = MakeWindows(series_, lookback, horizon);
}

void DataConfig::Validate() const {
  if (!csv_path && !synth) {
    throw ValidationError("data needs either csv_path or a synth spec");
  }
  if (csv_path && synth) {
    throw ValidationError("data.csv_path and data.synth are exclusive");
  }
  if (lookback == 0 || horizon == 0) {
    throw ValidationError("lookback and horizon must be positive");
  }
  split.Validate();
  if (synth) synth->Validate();
  if (corruption) corruption->Validate();
}

RawData LoadRawData(const DataConfig& config) {
  config.Validate();
  RawData raw;
  raw.series = config.csv_path ? LoadCsv(*config.csv_path)
                               : SynthClean(*config.synth);
  if (config.corruption) {
    auto corrupted = Corrupt(raw.series, *config.corruption);
    raw.series = std::move(corrupted.series);
    raw.labels = std::move(corrupted.labels);
  } else if (config.synth) {
    raw.labels = CleanLabels(raw.series.length(), raw.series.channels());
  }
  return raw;
}

PreparedData PrepareData(const RawData& raw, const DataConfig& config) {
  config.split.Validate();
  const auto lengths = SplitLengths(raw.series.length(), config.split);
  const Segments segments = ChronologicalSplit(raw.series, config.split);
  PreparedData out;
  out.stats = FitNormalizer(segments.train);

  std::size_t begin = 0;
  const TimeSeries* parts[3] = {&segments.train, &segments.val,
                                &segments.test};
  WindowedSegment* targets[3] = {&out.train, &out.val, &out.test};
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = begin + lengths[i];
    if (lengths[i] > 0) {
      LabelMatrix labels;
      if (!raw.labels.empty()) labels = SliceLabels(raw.labels, begin, end);
      *targets[i] = WindowedSegment(ApplyNormalizer(*parts[i], out.stats),
                                    config.lookback, config.horizon,
                                    std::move(labels));
    }
    begin = end;
  }
  return out;
}

PreparedData PrepareData(const DataConfig& config) {
  return PrepareData(LoadRawData(config), config);
}

}  // namespace sl

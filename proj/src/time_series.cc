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

#include "sl/time_series.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>

#include "sl/format.h"

namespace sl {

TimeSeries::TimeSeries(Matrix values, std::vector<std::string> channel_names)
    : values_(std::move(values)), channel_names_(std::move(channel_names)) {
  if (values_.rows() == 0 || values_.cols() == 0) {
    throw ContractError("time series needs at least one row and one channel");
  }
  for (double v : values_.values()) {
    if (!std::isfinite(v)) throw ContractError("time series value not finite");
  }
  if (channel_names_.empty()) channel_names_.resize(values_.cols());
  if (channel_names_.size() != values_.cols()) {
    throw ContractError("channel name count does not match channel count");
  }
  for (std::size_t c = 0; c < channel_names_.size(); ++c) {
    if (channel_names_[c].empty()) channel_names_[c] = "c" + std::to_string(c);
  }
}

TimeSeries TimeSeries::Slice(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > length()) {
    throw ContractError("invalid slice range");
  }
  std::vector<double> out(values_.values().begin() + begin * channels(),
                          values_.values().begin() + end * channels());
  return TimeSeries(Matrix(end - begin, channels(), std::move(out)),
                    channel_names_);
}

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      break;
    }
    fields.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

double ParseCell(std::string_view cell, std::size_t line) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(),
                                   value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError(line, "non-numeric cell '" + std::string(cell) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(line, "non-finite cell '" + std::string(cell) + "'");
  }
  return value;
}

}  // namespace

TimeSeries ParseCsv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> names;
  // Skip leading blank lines before the header.
  while (std::getline(in, line)) {
    ++line_no;
    if (!Trim(line).empty()) break;
  }
  if (Trim(line).empty()) throw EmptyInputError("CSV input is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  auto header = SplitFields(line);
  if (header.size() < 2) {
    throw ParseError(line_no, "header needs a timestamp column and at least "
                              "one data column");
  }
  for (std::size_t i = 1; i < header.size(); ++i) names.emplace_back(header[i]);

  const std::size_t width = header.size();
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto fields = SplitFields(line);
    if (fields.size() != width) {
      throw ParseError(line_no, "expected " + std::to_string(width) +
                                    " fields, found " +
                                    std::to_string(fields.size()));
    }
    for (std::size_t i = 1; i < width; ++i) {
      values.push_back(ParseCell(fields[i], line_no));
    }
    ++rows;
  }
  if (rows == 0) throw EmptyInputError("CSV has a header but no data rows");
  return TimeSeries(Matrix(rows, width - 1, std::move(values)),
                    std::move(names));
}

TimeSeries LoadCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  return ParseCsv(in);
}

void WriteCsv(const std::filesystem::path& path, const TimeSeries& series) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << "t";
  for (const auto& name : series.channel_names()) out << ',' << name;
  out << '\n';
  for (std::size_t t = 0; t < series.length(); ++t) {
    out << t;
    for (std::size_t c = 0; c < series.channels(); ++c) {
      out << ',' << FormatDouble(series(t, c));
    }
    out << '\n';
  }
}

void SplitSpec::Validate() const {
  if (!(train > 0.0) || val < 0.0 || test < 0.0) {
    throw ValidationError("split ratios must be non-negative with train > 0");
  }
  if (std::abs(train + val + test - 1.0) > 1e-9) {
    throw ValidationError("split ratios must sum to 1");
  }
}

std::array<std::size_t, 3> SplitLengths(std::size_t length,
                                        const SplitSpec& spec) {
  spec.Validate();
  // A tiny epsilon keeps products such as 10 * 0.7 from flooring to 6.
  auto boundary = [length](double cumulative) {
    double raw = static_cast<double>(length) * cumulative;
    return std::min(length,
                    static_cast<std::size_t>(std::floor(raw + 1e-9)));
  };
  std::size_t train_end = boundary(spec.train);
  std::size_t val_end = std::max(train_end, boundary(spec.train + spec.val));
  return {train_end, val_end - train_end, length - val_end};
}

Segments ChronologicalSplit(const TimeSeries& series, const SplitSpec& spec) {
  auto lengths = SplitLengths(series.length(), spec);
  Segments out;
  std::size_t begin = 0;
  TimeSeries* targets[3] = {&out.train, &out.val, &out.test};
  for (int i = 0; i < 3; ++i) {
    if (lengths[i] > 0) *targets[i] = series.Slice(begin, begin + lengths[i]);
    begin += lengths[i];
  }
  return out;
}

NormStats FitNormalizer(const TimeSeries& train_segment) {
  const std::size_t n = train_segment.length();
  const std::size_t channels = train_segment.channels();
  NormStats stats{std::vector<double>(channels, 0.0),
                  std::vector<double>(channels, 1.0)};
  for (std::size_t c = 0; c < channels; ++c) {
    double sum = 0.0;
    for (std::size_t t = 0; t < n; ++t) sum += train_segment(t, c);
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double d = train_segment(t, c) - mean;
      sq += d * d;
    }
    const double sd = std::sqrt(sq / static_cast<double>(n));
    stats.mean[c] = mean;
    stats.std[c] = sd > 0.0 ? sd : 1.0;
  }
  return stats;
}

namespace {

void CheckStats(const TimeSeries& series, const NormStats& stats) {
  if (stats.mean.size() != series.channels() ||
      stats.std.size() != series.channels()) {
    throw ContractError("normalizer channel count does not match series");
  }
}

}  // namespace

TimeSeries ApplyNormalizer(const TimeSeries& series, const NormStats& stats) {
  CheckStats(series, stats);
  Matrix out(series.length(), series.channels());
  for (std::size_t t = 0; t < series.length(); ++t) {
    for (std::size_t c = 0; c < series.channels(); ++c) {
      out(t, c) = (series(t, c) - stats.mean[c]) / stats.std[c];
    }
  }
  return TimeSeries(std::move(out), series.channel_names());
}

TimeSeries InvertNormalizer(const TimeSeries& series, const NormStats& stats) {
  CheckStats(series, stats);
  Matrix out(series.length(), series.channels());
  for (std::size_t t = 0; t < series.length(); ++t) {
    for (std::size_t c = 0; c < series.channels(); ++c) {
      out(t, c) = series(t, c) * stats.std[c] + stats.mean[c];
    }
  }
  return TimeSeries(std::move(out), series.channel_names());
}

std::vector<WindowSample> MakeWindows(std::size_t segment_length,
                                      std::size_t lookback,
                                      std::size_t horizon) {
  if (lookback == 0 || horizon == 0) {
    throw ContractError("lookback and horizon must be positive");
  }
  if (segment_length < lookback + horizon) {
    throw SizingError(lookback + horizon, segment_length);
  }
  std::vector<WindowSample> windows;
  windows.reserve(segment_length - lookback - horizon + 1);
  for (std::size_t t = lookback; t + horizon <= segment_length; ++t) {
    windows.push_back({t, lookback, horizon});
  }
  return windows;
}

std::vector<WindowSample> MakeWindows(const TimeSeries& segment,
                                      std::size_t lookback,
                                      std::size_t horizon) {
  return MakeWindows(segment.length(), lookback, horizon);
}

std::size_t TargetCoverage(std::size_t u, std::size_t segment_length,
                           std::size_t lookback, std::size_t horizon) {
  if (u < lookback || u >= segment_length ||
      segment_length < lookback + horizon) {
    return 0;
  }
  return std::min({u - lookback + 1, horizon, segment_length - u,
                   segment_length - lookback - horizon + 1});
}

Matrix WindowInput(const TimeSeries& segment, const WindowSample& w) {
  if (w.origin < w.lookback || w.origin > segment.length()) {
    throw ContractError("window input outside segment");
  }
  Matrix out(w.lookback, segment.channels());
  for (std::size_t r = 0; r < w.lookback; ++r) {
    for (std::size_t c = 0; c < segment.channels(); ++c) {
      out(r, c) = segment(w.input_begin() + r, c);
    }
  }
  return out;
}

Matrix WindowTarget(const TimeSeries& segment, const WindowSample& w) {
  if (w.target_end() > segment.length()) {
    throw ContractError("window target outside segment");
  }
  Matrix out(w.horizon, segment.channels());
  for (std::size_t r = 0; r < w.horizon; ++r) {
    for (std::size_t c = 0; c < segment.channels(); ++c) {
      out(r, c) = segment(w.origin + r, c);
    }
  }
  return out;
}

ChannelMajorSeries::ChannelMajorSeries(const TimeSeries& series)
    : length_(series.length()),
      channels_(series.channels()),
      data_(series.length() * series.channels()) {
  for (std::size_t c = 0; c < channels_; ++c) {
    for (std::size_t t = 0; t < length_; ++t) {
      data_[c * length_ + t] = series(t, c);
    }
  }
}

}  // namespace sl

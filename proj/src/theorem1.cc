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

#include "sl/theorem1.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sl/optimizer.h"
#include "sl/residual_archive.h"
#include "sl/trainer.h"

namespace sl {

double Theorem1Bound(double lipschitz, double residual_bound, double lr,
                     double clip_norm, std::size_t iterations_per_epoch) {
  const double k = static_cast<double>(iterations_per_epoch);
  return 4.0 * lipschitz * residual_bound * lr * clip_norm * (2.0 * k - 1.0);
}

namespace {

Matrix InputOf(const WindowedSegment& segment, const WindowSample& w) {
  Matrix x(w.lookback, segment.channels());
  for (std::size_t c = 0; c < segment.channels(); ++c) {
    auto in = segment.columns().Input(w, c);
    for (std::size_t r = 0; r < w.lookback; ++r) x(r, c) = in[r];
  }
  return x;
}

double ProbeRatio(const ForecasterParams& params, const Matrix& input,
                  const std::vector<double>& direction) {
  ForecasterParams moved = params;
  for (std::size_t i = 0; i < direction.size(); ++i) {
    moved.values[i] += direction[i];
  }
  const Matrix a = Forward(params, input);
  const Matrix b = Forward(moved, input);
  double num = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    num += d * d;
  }
  const double den = GlobalNorm(direction);
  return den > 0.0 ? std::sqrt(num) / den : 0.0;
}

// Top eigenvector of A A^T where A is (L+1) x N: window columns with a
// trailing 1 for the bias.
std::vector<double> WorstDirection(const Matrix& input) {
  const std::size_t l = input.rows();
  const std::size_t n = input.cols();
  auto aug = [&](std::size_t r, std::size_t c) {
    return r < l ? input(r, c) : 1.0;
  };
  std::vector<double> v(l + 1, 1.0);
  std::vector<double> u(n);
  for (int iter = 0; iter < 200; ++iter) {
    for (std::size_t c = 0; c < n; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r <= l; ++r) s += aug(r, c) * v[r];
      u[c] = s;
    }
    std::vector<double> next(l + 1, 0.0);
    for (std::size_t r = 0; r <= l; ++r) {
      for (std::size_t c = 0; c < n; ++c) next[r] += aug(r, c) * u[c];
    }
    const double norm = GlobalNorm(next);
    if (norm == 0.0) break;
    for (double& x : next) x /= norm;
    v.swap(next);
  }
  return v;
}

// Population variance summed in ascending order, so that two equal
// multisets give bit-identical results whatever order they were stored in.
double SortedVariance(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return sq / static_cast<double>(values.size());
}

}  // namespace

double MeasureLinearLipschitz(const ForecasterParams& params,
                              const WindowedSegment& segment,
                              std::size_t random_probes, std::uint64_t seed) {
  if (params.shape.kind != ModelKind::kLinear) {
    throw ContractError("Lipschitz probing supports the linear model only");
  }
  if (segment.empty()) throw ContractError("Lipschitz probing needs windows");
  const std::size_t l = params.shape.lookback;
  const std::size_t f = params.shape.horizon;
  double best = 0.0;
  std::vector<double> direction(params.values.size());
  for (const auto& w : segment.windows()) {
    const Matrix input = InputOf(segment, w);
    const auto v = WorstDirection(input);
    std::fill(direction.begin(), direction.end(), 0.0);
    // Row 0 of the weight block plus bias entry 0.
    for (std::size_t j = 0; j < l; ++j) direction[j] = v[j];
    direction[f * l] = v[l];
    best = std::max(best, ProbeRatio(params, input, direction));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(
      0, segment.windows().size() - 1);
  for (std::size_t p = 0; p < random_probes; ++p) {
    const Matrix input = InputOf(segment, segment.windows()[pick(rng)]);
    for (double& d : direction) d = normal(rng);
    best = std::max(best, ProbeRatio(params, input, direction));
  }
  return best;
}

Theorem1Report Theorem1Check(const Theorem1Config& config,
                             const WindowedSegment& train) {
  if (train.empty()) throw ContractError("theorem check needs train windows");
  if (config.batch_size == 0 || config.epochs == 0) {
    throw ValidationError("theorem check needs positive batch and epochs");
  }
  if (!(config.clip_norm > 0.0) || !(config.lr >= 0.0)) {
    throw ValidationError("theorem check needs clip > 0 and lr >= 0");
  }
  const std::size_t l = train.lookback();
  const std::size_t f = train.horizon();
  const std::size_t n_channels = train.channels();
  const auto& windows = train.windows();
  const auto& columns = train.columns();

  ForecasterParams params =
      InitParams({ModelKind::kLinear, l, f, 0, 1}, DeriveSeed(config.seed, 1));
  OptimizerConfig sgd{OptimizerKind::kSgd, config.lr, 0.9, 0.999, 1e-8,
                      config.clip_norm};
  std::mt19937_64 shuffle_rng(DeriveSeed(config.seed, 2));
  std::mt19937_64 sample_rng(DeriveSeed(config.seed, 5));
  ResidualArchive archive(train.length(), n_channels, l, f);

  Theorem1Report report;
  report.lr = config.lr;
  report.clip_norm = config.clip_norm;
  report.epochs = config.epochs;
  report.iterations_per_epoch =
      (windows.size() + config.batch_size - 1) / config.batch_size;

  double residual_bound = 0.0;
  ModelWorkspace ws;
  std::vector<double> pred(f);
  GradientSet grad = ZeroGradient(params.shape);

  // Keys whose buffer holds one residual per covering window.
  std::vector<std::pair<std::size_t, std::size_t>> keys;
  for (std::size_t t = 0; t < train.length(); ++t) {
    if (archive.Capacity(t) < 2) continue;
    for (std::size_t c = 0; c < n_channels; ++c) keys.emplace_back(t, c);
  }

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<std::size_t> order(windows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::fill(grad.values.begin(), grad.values.end(), 0.0);
      const double scale =
          2.0 / static_cast<double>((end - start) * f * n_channels);
      std::vector<double> upstream(f);
      for (std::size_t k = start; k < end; ++k) {
        const auto& w = windows[order[k]];
        for (std::size_t c = 0; c < n_channels; ++c) {
          ForwardChannel(params, columns.Input(w, c), pred, ws);
          auto target = columns.Target(w, c);
          for (std::size_t h = 0; h < f; ++h) {
            const double r = target[h] - pred[h];
            archive.Record(w.origin + h, c, r);
            residual_bound = std::max(residual_bound, std::abs(r));
            upstream[h] = -scale * r;
          }
          AccumulateChannelGradient(params, columns.Input(w, c), upstream,
                                    grad.values, ws);
        }
      }
      SgdStep(sgd, params, grad);
    }

    // Epoch boundary: recompute sampled variances with frozen parameters.
    std::vector<std::size_t> picks(keys.size());
    std::iota(picks.begin(), picks.end(), std::size_t{0});
    std::shuffle(picks.begin(), picks.end(), sample_rng);
    picks.resize(std::min(picks.size(), config.max_timesteps));
    double epoch_gap = 0.0;
    for (std::size_t idx : picks) {
      const auto [t, c] = keys[idx];
      std::vector<double> archived = archive.Contents(t, c);
      if (archived.size() < 2) continue;
      std::vector<double> fresh;
      const std::size_t first_origin = std::max(l, t + 1 >= f ? t + 1 - f : 0);
      for (std::size_t origin = first_origin;
           origin <= t && origin + f <= train.length(); ++origin) {
        const WindowSample w{origin, l, f};
        ForwardChannel(params, columns.Input(w, c), pred, ws);
        const double r = columns.Channel(c)[t] - pred[t - origin];
        residual_bound = std::max(residual_bound, std::abs(r));
        fresh.push_back(r);
      }
      const double gap =
          std::abs(SortedVariance(archived) - SortedVariance(fresh));
      epoch_gap = std::max(epoch_gap, gap);
      ++report.checked_timesteps;
    }
    report.max_gap_per_epoch.push_back(epoch_gap);
    report.max_gap = std::max(report.max_gap, epoch_gap);
  }

  report.residual_bound = residual_bound;
  report.lipschitz = MeasureLinearLipschitz(params, train, config.random_probes,
                                            DeriveSeed(config.seed, 6));
  report.bound =
      Theorem1Bound(report.lipschitz, report.residual_bound, report.lr,
                    report.clip_norm, report.iterations_per_epoch);
  report.pass = report.max_gap <= report.bound;
  return report;
}

}  // namespace sl

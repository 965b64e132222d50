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

#include "sl/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "sl/parallel.h"
#include "sl/synthetic.h"

namespace sl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum SeedStream : std::uint64_t {
  kInitStream = 1,
  kShuffleStream = 2,
  kMaskStream = 3,
};

void RequireCompatible(const ModelShape& shape, const WindowedSegment& seg,
                       const char* what) {
  if (seg.empty()) return;
  if (shape.lookback != seg.lookback() || shape.horizon != seg.horizon()) {
    throw ContractError(std::string(what) +
                        ": model L/F do not match the windows");
  }
}

std::vector<std::size_t> ShuffledOrder(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

// Per-sample prediction of every channel into an F x N matrix.
void PredictWindow(const ForecasterParams& params,
                   const ChannelMajorSeries& columns, const WindowSample& w,
                   Matrix& out, std::vector<double>& scratch,
                   ModelWorkspace& ws) {
  const std::size_t f = w.horizon;
  scratch.resize(f);
  for (std::size_t c = 0; c < columns.channels(); ++c) {
    ForwardChannel(params, columns.Input(w, c), scratch, ws);
    for (std::size_t i = 0; i < f; ++i) out(i, c) = scratch[i];
  }
}

// Adds the parameter gradient of a per-sample F x N upstream into grad.
void BackpropWindow(const ForecasterParams& params,
                    const ChannelMajorSeries& columns, const WindowSample& w,
                    const Matrix& upstream, std::span<double> grad,
                    std::vector<double>& scratch, ModelWorkspace& ws) {
  scratch.resize(w.horizon);
  for (std::size_t c = 0; c < columns.channels(); ++c) {
    bool any = false;
    for (std::size_t i = 0; i < w.horizon; ++i) {
      scratch[i] = upstream(i, c);
      any = any || scratch[i] != 0.0;
    }
    if (any) {
      AccumulateChannelGradient(params, columns.Input(w, c), scratch, grad,
                                ws);
    }
  }
}

Matrix TargetOf(const ChannelMajorSeries& columns, const WindowSample& w) {
  Matrix out(w.horizon, columns.channels());
  for (std::size_t c = 0; c < columns.channels(); ++c) {
    auto target = columns.Target(w, c);
    for (std::size_t i = 0; i < w.horizon; ++i) out(i, c) = target[i];
  }
  return out;
}

struct SampleOutcome {
  bool skipped = false;
  double loss = 0.0;
  std::size_t masked_u = 0;
  std::size_t masked_a = 0;
  std::size_t masked = 0;
  std::size_t spikes = 0;
  std::size_t masked_a_spikes = 0;
  std::size_t masked_spikes = 0;
};

}  // namespace

std::string_view AblationModeName(AblationMode mode) {
  switch (mode) {
    case AblationMode::kSelective:
      return "selective";
    case AblationMode::kPlainMse:
      return "plain_mse";
    case AblationMode::kRandomMask:
      return "random_mask";
    case AblationMode::kUncertaintyOnly:
      return "uncertainty_only";
    case AblationMode::kAnomalyOnly:
      return "anomaly_only";
  }
  return "unknown";
}

AblationMode ParseAblationMode(std::string_view name) {
  for (auto mode : {AblationMode::kSelective, AblationMode::kPlainMse,
                    AblationMode::kRandomMask, AblationMode::kUncertaintyOnly,
                    AblationMode::kAnomalyOnly}) {
    if (AblationModeName(mode) == name) return mode;
  }
  throw ValidationError("unknown mode '" + std::string(name) + "'");
}

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream) {
  // splitmix64 finalizer over base and stream.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

MaskRatios TrainRunConfig::EffectiveRatios() const {
  switch (mode) {
    case AblationMode::kSelective:
      return ratios;
    case AblationMode::kPlainMse:
    case AblationMode::kRandomMask:
      return {0.0, 0.0};
    case AblationMode::kUncertaintyOnly:
      return {ratios.uncertainty, 0.0};
    case AblationMode::kAnomalyOnly:
      return {0.0, ratios.anomaly};
  }
  return ratios;
}

void TrainRunConfig::Validate() const {
  model.Validate();
  ratios.Validate();
  optimizer.Validate();
  if (batch_size == 0) throw ValidationError("batch_size must be positive");
  if (epochs == 0) throw ValidationError("epochs must be positive");
  if (threads == 0) throw ValidationError("threads must be positive");
  if (random_mask_fraction &&
      !(*random_mask_fraction >= 0.0 && *random_mask_fraction <= 1.0)) {
    throw ValidationError("random_mask_fraction must lie in [0, 1]");
  }
}

std::vector<Matrix> PredictAll(const ForecasterParams& params,
                               const WindowedSegment& segment) {
  RequireCompatible(params.shape, segment, "PredictAll");
  std::vector<Matrix> out;
  out.reserve(segment.windows().size());
  ModelWorkspace ws;
  std::vector<double> scratch;
  for (const auto& w : segment.windows()) {
    Matrix pred(w.horizon, segment.channels());
    PredictWindow(params, segment.columns(), w, pred, scratch, ws);
    out.push_back(std::move(pred));
  }
  return out;
}

Metrics Evaluate(const ForecasterParams& params,
                 const WindowedSegment& segment,
                 const NormStats* original_scale) {
  if (segment.empty()) throw ContractError("Evaluate: no windows");
  RequireCompatible(params.shape, segment, "Evaluate");
  if (original_scale && original_scale->std.size() != segment.channels()) {
    throw ContractError("Evaluate: normalizer channel count mismatch");
  }
  ModelWorkspace ws;
  std::vector<double> pred(params.shape.horizon);
  double sq = 0.0;
  double abs_sum = 0.0;
  const auto& columns = segment.columns();
  for (const auto& w : segment.windows()) {
    for (std::size_t c = 0; c < segment.channels(); ++c) {
      ForwardChannel(params, columns.Input(w, c), pred, ws);
      auto target = columns.Target(w, c);
      const double scale = original_scale ? original_scale->std[c] : 1.0;
      for (std::size_t i = 0; i < w.horizon; ++i) {
        const double e = (target[i] - pred[i]) * scale;
        sq += e * e;
        abs_sum += std::abs(e);
      }
    }
  }
  const double n = static_cast<double>(segment.windows().size() *
                                       params.shape.horizon *
                                       segment.channels());
  return {sq / n, abs_sum / n};
}

Metrics ZeroShot(const ForecasterParams& params,
                 const WindowedSegment& segment) {
  if (segment.lookback() != params.shape.lookback ||
      segment.horizon() != params.shape.horizon) {
    throw ContractError("zero-shot: dataset L/F differ from the model");
  }
  return Evaluate(params, segment);
}

ForecasterParams PretrainEstimator(const WindowedSegment& train,
                                   const EstimatorConfig& config,
                                   EstimatorReport* report) {
  if (config.max_epochs == 0) {
    throw TrainingError("estimator epoch cap is zero; cannot converge");
  }
  if (train.empty()) throw ContractError("estimator needs train windows");
  if (config.batch_size == 0) throw ValidationError("batch_size must be > 0");
  ModelShape shape = config.shape;
  shape.lookback = train.lookback();
  shape.horizon = train.horizon();
  ForecasterParams params =
      InitParams(shape, DeriveSeed(config.seed, kInitStream));
  AdamState adam = MakeAdamState(config.optimizer, params.values.size());
  std::mt19937_64 rng(DeriveSeed(config.seed, kShuffleStream));

  const auto& windows = train.windows();
  const auto& columns = train.columns();
  ModelWorkspace ws;
  std::vector<double> scratch;
  Matrix pred(shape.horizon, train.channels());
  GradientSet batch_grad = ZeroGradient(shape);
  EstimatorReport local;
  double prev = kNaN;
  std::size_t streak = 0;
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    auto order = ShuffledOrder(windows.size(), rng);
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::fill(batch_grad.values.begin(), batch_grad.values.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const auto& w = windows[order[k]];
        PredictWindow(params, columns, w, pred, scratch, ws);
        Matrix upstream = MseLossGrad(pred, TargetOf(columns, w));
        BackpropWindow(params, columns, w, upstream, batch_grad.values,
                       scratch, ws);
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (double& g : batch_grad.values) g *= inv;
      OptimizerStep(adam, params, batch_grad);
    }
    const double mse = Evaluate(params, train).mse;
    if (!std::isfinite(mse)) {
      throw TrainingError("estimator training diverged at epoch " +
                          std::to_string(epoch + 1));
    }
    local.train_mse.push_back(mse);
    if (epoch > 0) {
      const double rel = prev > 0.0 ? (prev - mse) / prev : 0.0;
      streak = rel < config.tolerance ? streak + 1 : 0;
      if (streak >= config.patience) {
        local.converged = true;
        break;
      }
    }
    prev = mse;
  }
  if (report) *report = std::move(local);
  return params;
}

double RealizedCombinedFraction(const EpochHistory& history) {
  double masked = 0.0;
  double entries = 0.0;
  for (const auto& e : history.epochs) {
    masked += static_cast<double>(e.combined_masked);
    entries += static_cast<double>(e.entries);
  }
  return entries > 0.0 ? masked / entries : 0.0;
}

TrainResult TrainSelective(const TrainRunConfig& config,
                           const WindowedSegment& train,
                           const WindowedSegment& val,
                           const WindowedSegment& test,
                           const ForecasterParams* estimator,
                           const MaskAuditSink& audit,
                           const EpochSink& on_epoch) {
  if (train.empty()) throw ContractError("training needs train windows");
  // The model's window sizes always come from the data.
  ModelShape shape = config.model;
  shape.lookback = train.lookback();
  shape.horizon = train.horizon();
  {
    TrainRunConfig checked = config;
    checked.model = shape;
    checked.Validate();
  }
  RequireCompatible(shape, val, "validation split");
  RequireCompatible(shape, test, "test split");

  const MaskRatios ratios = config.EffectiveRatios();
  const bool random_mode = config.mode == AblationMode::kRandomMask;
  if (random_mode && !config.random_mask_fraction) {
    throw ContractError("random_mask mode needs random_mask_fraction");
  }
  const double random_fraction =
      random_mode ? *config.random_mask_fraction : 0.0;
  if (ratios.anomaly > 0.0 && estimator == nullptr) {
    throw ContractError("anomaly masking needs a pretrained estimator");
  }
  if (estimator) RequireCompatible(estimator->shape, train, "estimator");

  const std::size_t f = shape.horizon;
  const std::size_t n_channels = train.channels();
  const auto& windows = train.windows();
  const auto& columns = train.columns();
  const LabelMatrix& labels = train.labels();
  const bool have_labels = !labels.empty();
  const std::size_t threads = config.threads;

  // g is frozen, so its predictions are computed once.
  std::vector<Matrix> estimator_preds;
  if (estimator) estimator_preds = PredictAll(*estimator, train);

  TrainResult result;
  ForecasterParams params =
      InitParams(shape, DeriveSeed(config.seed, kInitStream));
  AdamState adam = MakeAdamState(config.optimizer, params.values.size());
  std::mt19937_64 shuffle_rng(DeriveSeed(config.seed, kShuffleStream));
  std::mt19937_64 mask_rng(DeriveSeed(config.seed, kMaskStream));
  std::bernoulli_distribution drop(random_fraction);
  result.archive =
      ResidualArchive(train.length(), n_channels, shape.lookback, f);
  ResidualArchive& archive = result.archive;

  const std::size_t batch = std::min(config.batch_size, windows.size());
  std::vector<Matrix> preds(batch, Matrix(f, n_channels));
  std::vector<Mask> random_masks(batch, Mask(f, n_channels, 1));
  std::vector<std::vector<double>> grads(
      batch, std::vector<double>(params.values.size()));
  std::vector<SampleOutcome> outcomes(batch);
  // Audit payloads, emitted in batch order after the parallel section.
  std::vector<Matrix> audit_entropies(audit ? batch : 0);
  std::vector<Matrix> audit_scores(audit ? batch : 0);
  std::vector<MaskPair> audit_masks(audit ? batch : 0);
  std::vector<ModelWorkspace> workspaces(threads);
  std::vector<std::vector<double>> scratch(threads);
  GradientSet batch_grad = ZeroGradient(shape);

  double best_val = kInf;
  std::size_t since_best = 0;
  Matrix entropy_table;
  const Matrix no_entropy(f, n_channels, -kInf);

  for (std::size_t epoch_index = 0; epoch_index < config.epochs;
       ++epoch_index) {
    const int epoch = static_cast<int>(epoch_index) + 1;
    EpochRecord record;
    record.epoch = epoch;

    // Once-per-epoch refresh from the archive state left by the previous
    // epoch. Epoch 1 has no estimate yet, so nothing is uncertain.
    UncertaintyThresholds thresholds = DisabledThresholds(n_channels);
    const bool uncertainty_active = epoch >= 2 && ratios.uncertainty > 0.0;
    if (uncertainty_active || (audit && epoch >= 2)) {
      entropy_table = EntropyTable(archive);
    }
    if (uncertainty_active) {
      thresholds =
          UpdateUncertaintyThresholds(entropy_table, ratios.uncertainty, epoch);
    }
    thresholds.epoch = epoch;
    record.gamma_u = thresholds.gamma;

    auto order = ShuffledOrder(windows.size(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t loss_count = 0;

    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t n = std::min(batch, order.size() - start);
      auto window_of = [&](std::size_t i) -> const WindowSample& {
        return windows[order[start + i]];
      };

      ParallelFor(n, threads, [&](std::size_t i, std::size_t worker) {
        PredictWindow(params, columns, window_of(i), preds[i],
                      scratch[worker], workspaces[worker]);
      });

      // Residuals enter the archive in batch order, before the update.
      for (std::size_t i = 0; i < n; ++i) {
        const WindowSample& w = window_of(i);
        for (std::size_t c = 0; c < n_channels; ++c) {
          auto target = columns.Target(w, c);
          for (std::size_t h = 0; h < f; ++h) {
            archive.Record(w.origin + h, c, target[h] - preds[i](h, c));
          }
        }
      }

      if (random_mode) {
        for (std::size_t i = 0; i < n; ++i) {
          for (auto& v : random_masks[i].values()) v = drop(mask_rng) ? 0 : 1;
        }
      }

      ParallelFor(n, threads, [&](std::size_t i, std::size_t worker) {
        const WindowSample& w = window_of(i);
        const Matrix& pred = preds[i];
        Matrix target = TargetOf(columns, w);
        SampleOutcome& out = outcomes[i];
        out = SampleOutcome{};

        Matrix entropies = no_entropy;
        if (!entropy_table.empty() && epoch >= 2) {
          for (std::size_t h = 0; h < f; ++h) {
            for (std::size_t c = 0; c < n_channels; ++c) {
              entropies(h, c) = entropy_table(w.origin + h, c);
            }
          }
        }
        Matrix scores(f, n_channels, 0.0);
        if (estimator) {
          Matrix residual_f(f, n_channels);
          Matrix residual_g(f, n_channels);
          const Matrix& g_pred = estimator_preds[order[start + i]];
          for (std::size_t k = 0; k < target.size(); ++k) {
            residual_f.values()[k] = target.values()[k] - pred.values()[k];
            residual_g.values()[k] = target.values()[k] - g_pred.values()[k];
          }
          scores = AnomalyScores(residual_f, residual_g);
        }

        MaskPair masks;
        masks.uncertainty = uncertainty_active
                                ? UncertaintyMask(entropies, thresholds)
                                : AllKept(f, n_channels);
        masks.anomaly = ratios.anomaly > 0.0
                            ? AnomalyMask(scores, ratios.anomaly).mask
                            : AllKept(f, n_channels);
        masks.combined = random_mode
                             ? random_masks[i]
                             : Combine(masks.uncertainty, masks.anomaly);

        for (std::size_t h = 0; h < f; ++h) {
          for (std::size_t c = 0; c < n_channels; ++c) {
            const bool spike =
                have_labels &&
                labels(w.origin + h, c) ==
                    static_cast<std::uint8_t>(CorruptionLabel::kSpike);
            const bool mu = masks.uncertainty(h, c) == 0;
            const bool ma = masks.anomaly(h, c) == 0;
            const bool m = masks.combined(h, c) == 0;
            out.masked_u += mu;
            out.masked_a += ma;
            out.masked += m;
            out.spikes += spike;
            out.masked_a_spikes += ma && spike;
            out.masked_spikes += m && spike;
          }
        }

        if (audit) {
          audit_entropies[i] = entropies;
          audit_scores[i] = scores;
          audit_masks[i] = masks;
        }

        auto& grad = grads[i];
        std::fill(grad.begin(), grad.end(), 0.0);
        if (KeptCount(masks.combined) == 0) {
          out.skipped = true;
          return;
        }
        out.loss = SelectiveLoss(pred, target, masks.combined);
        Matrix upstream = SelectiveLossGrad(pred, target, masks.combined);
        BackpropWindow(params, columns, w, upstream, grad, scratch[worker],
                       workspaces[worker]);
      });

      if (audit) {
        for (std::size_t i = 0; i < n; ++i) {
          audit({epoch, window_of(i), audit_entropies[i], audit_scores[i],
                 audit_masks[i]});
        }
      }

      // Fixed-order reduction keeps results independent of thread count.
      std::fill(batch_grad.values.begin(), batch_grad.values.end(), 0.0);
      std::size_t used = 0;
      double batch_loss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const SampleOutcome& out = outcomes[i];
        record.entries += f * n_channels;
        record.spike_entries += out.spikes;
        record.anomaly_masked += out.masked_a;
        record.anomaly_masked_spikes += out.masked_a_spikes;
        record.combined_masked += out.masked;
        record.combined_masked_spikes += out.masked_spikes;
        record.frac_uncertainty += static_cast<double>(out.masked_u);
        if (out.skipped) {
          ++record.skipped_samples;
          continue;
        }
        ++used;
        batch_loss += out.loss;
        for (std::size_t k = 0; k < batch_grad.values.size(); ++k) {
          batch_grad.values[k] += grads[i][k];
        }
      }
      if (used == 0) {
        ++record.skipped_updates;
        continue;
      }
      const double inv = 1.0 / static_cast<double>(used);
      for (double& g : batch_grad.values) g *= inv;
      batch_grad.loss = batch_loss * inv;
      if (!std::isfinite(batch_grad.loss)) {
        throw TrainingError("non-finite selective loss in epoch " +
                            std::to_string(epoch));
      }
      loss_sum += batch_loss;
      loss_count += used;
      OptimizerStep(adam, params, batch_grad);
    }

    const double entries = static_cast<double>(record.entries);
    record.frac_uncertainty /= entries;
    record.frac_anomaly = static_cast<double>(record.anomaly_masked) / entries;
    record.frac_combined =
        static_cast<double>(record.combined_masked) / entries;
    record.train_loss = loss_count > 0
                            ? loss_sum / static_cast<double>(loss_count)
                            : kNaN;
    record.val = val.empty() ? Metrics{kNaN, kNaN} : Evaluate(params, val);
    record.test = test.empty() ? Metrics{kNaN, kNaN} : Evaluate(params, test);
    result.history.epochs.push_back(record);
    if (on_epoch) on_epoch(record);

    if (val.empty()) {
      result.best = params;
      result.best_epoch = epoch;
      continue;
    }
    if (record.val.mse < best_val) {
      best_val = record.val.mse;
      result.best = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (config.patience > 0 && ++since_best >= config.patience) {
      break;
    }
  }
  if (result.best.values.empty()) {
    // Validation MSE never finite; fall back to the last parameters.
    result.best = params;
    result.best_epoch = static_cast<int>(result.history.epochs.size());
  }
  result.final = std::move(params);
  return result;
}

TrainResult TrainAblation(const TrainRunConfig& config,
                          const WindowedSegment& train,
                          const WindowedSegment& val,
                          const WindowedSegment& test,
                          const ForecasterParams* estimator,
                          const MaskAuditSink& audit,
                          const EpochSink& on_epoch) {
  if (config.mode != AblationMode::kRandomMask ||
      config.random_mask_fraction) {
    return TrainSelective(config, train, val, test, estimator, audit,
                          on_epoch);
  }
  TrainRunConfig selective = config;
  selective.mode = AblationMode::kSelective;
  const TrainResult reference =
      TrainSelective(selective, train, val, test, estimator);
  TrainRunConfig matched = config;
  matched.random_mask_fraction = RealizedCombinedFraction(reference.history);
  return TrainSelective(matched, train, val, test, estimator, audit,
                        on_epoch);
}

}  // namespace sl

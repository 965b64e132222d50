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

// Selective training loop.
//
// Per iteration: forward f on the batch, record residuals into the archive
// (before the update), build the uncertainty mask from the entropy snapshot
// taken at the start of the epoch (disabled in epoch 1), build the anomaly
// mask from |eps_f| - |eps_g| of the current predictions, combine, and take
// one optimizer step on the mean per-sample selective loss. Samples whose
// combined mask keeps nothing are skipped; a batch with no surviving sample
// skips the update.

#ifndef SL_TRAINER_H_
#define SL_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "sl/dataset.h"
#include "sl/dual_mask.h"
#include "sl/models.h"
#include "sl/optimizer.h"
#include "sl/residual_archive.h"

namespace sl {

enum class AblationMode {
  kSelective,
  kPlainMse,
  kRandomMask,
  kUncertaintyOnly,
  kAnomalyOnly,
};

std::string_view AblationModeName(AblationMode mode);
AblationMode ParseAblationMode(std::string_view name);

// Independent, reproducible RNG streams derived from one base seed.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream);

struct EstimatorConfig {
  ModelShape shape{ModelKind::kDLinear, 0, 0, 0, 25};
  OptimizerConfig optimizer{};
  std::size_t batch_size = 32;
  // Converged once the relative train-MSE improvement stays below tolerance
  // for `patience` consecutive epochs.
  double tolerance = 1e-4;
  std::size_t patience = 3;
  std::size_t max_epochs = 200;
  std::uint64_t seed = 0;
};

struct EstimatorReport {
  std::vector<double> train_mse;  // full-pass train MSE after each epoch
  bool converged = false;
};

// Plain-MSE training of g on the train windows. Throws TrainingError when the
// epoch cap is zero or the loss becomes non-finite.
ForecasterParams PretrainEstimator(const WindowedSegment& train,
                                   const EstimatorConfig& config,
                                   EstimatorReport* report = nullptr);

struct TrainRunConfig {
  ModelShape model{ModelKind::kMlp, 0, 0, 64, 25};
  MaskRatios ratios{};
  AblationMode mode = AblationMode::kSelective;
  // Probability that an entry is excluded in random_mask mode.
  std::optional<double> random_mask_fraction;
  OptimizerConfig optimizer{};
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  // Early stop after this many epochs without a new best validation MSE.
  // Zero disables early stopping.
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  // The ratios actually used after applying the ablation mode.
  MaskRatios EffectiveRatios() const;
  void Validate() const;
};

struct Metrics {
  double mse = 0.0;
  double mae = 0.0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  Metrics val;
  Metrics test;
  // Fractions of all target entries processed in the epoch.
  double frac_uncertainty = 0.0;
  double frac_anomaly = 0.0;
  double frac_combined = 0.0;
  std::size_t skipped_samples = 0;
  std::size_t skipped_updates = 0;
  std::vector<double> gamma_u;

  // Counts against ground-truth labels, when the train segment has them.
  std::size_t entries = 0;
  std::size_t spike_entries = 0;
  std::size_t anomaly_masked = 0;
  std::size_t anomaly_masked_spikes = 0;
  std::size_t combined_masked = 0;
  std::size_t combined_masked_spikes = 0;
};

struct EpochHistory {
  std::vector<EpochRecord> epochs;
};

// Called for every processed sample, in batch order, after its masks are
// built.
struct MaskAuditEvent {
  int epoch;
  const WindowSample& window;
  const Matrix& entropies;  // F x N, -inf where undefined
  const Matrix& scores;     // F x N anomaly scores (0 without an estimator)
  const MaskPair& masks;
};
using MaskAuditSink = std::function<void(const MaskAuditEvent&)>;
// Called once per finished epoch with its record.
using EpochSink = std::function<void(const EpochRecord&)>;

struct TrainResult {
  ForecasterParams best;   // best validation MSE (final when no val split)
  ForecasterParams final;
  EpochHistory history;
  int best_epoch = 0;
  ResidualArchive archive;  // state after the last iteration
};

// `estimator` must be non-null whenever the effective anomaly ratio is
// positive; it is never modified.
TrainResult TrainSelective(const TrainRunConfig& config,
                           const WindowedSegment& train,
                           const WindowedSegment& val,
                           const WindowedSegment& test,
                           const ForecasterParams* estimator,
                           const MaskAuditSink& audit = {},
                           const EpochSink& on_epoch = {});

// Ablation variants. For random_mask without an explicit fraction, a
// selective run with the same config is executed first and its realized
// combined masked fraction is used.
TrainResult TrainAblation(const TrainRunConfig& config,
                          const WindowedSegment& train,
                          const WindowedSegment& val,
                          const WindowedSegment& test,
                          const ForecasterParams* estimator,
                          const MaskAuditSink& audit = {},
                          const EpochSink& on_epoch = {});

// Masked fraction over all epochs of a history, weighted by entries.
double RealizedCombinedFraction(const EpochHistory& history);

// Unmasked MSE / MAE over every window, horizon step and channel. With
// `original_scale` the errors are mapped back through the normalizer.
Metrics Evaluate(const ForecasterParams& params,
                 const WindowedSegment& segment,
                 const NormStats* original_scale = nullptr);

// Evaluate on a foreign dataset. L and F must match the model; the channel
// count may differ.
Metrics ZeroShot(const ForecasterParams& params,
                 const WindowedSegment& segment);

// Predictions of `params` for every window of the segment, window-major:
// out[w] is F x N.
std::vector<Matrix> PredictAll(const ForecasterParams& params,
                               const WindowedSegment& segment);

}  // namespace sl

#endif  // SL_TRAINER_H_

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

// Acceptance gate. Each criterion prints one PASS/FAIL line; the process
// exits non-zero when any criterion fails.
//
// The directional experiments (6-9) share one protocol: synthetic data with
// seed s, corruption seed 100 + s, training and estimator seed s, for
// s = 1..5, and a fixed epoch budget with early stopping disabled. Test MSE
// means the test MSE of the final-epoch parameters.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "../gradcheck.h"
#include "sl/artifacts.h"
#include "sl/cli.h"
#include "sl/dual_mask.h"
#include "sl/residual_archive.h"
#include "sl/run_config.h"
#include "sl/theorem1.h"
#include "sl/trainer.h"

namespace sl {
namespace {

namespace fs = std::filesystem;

constexpr int kSeeds = 5;

struct Verdict {
  bool pass = true;
  std::string detail;

  // Records a failed check without stopping the criterion.
  void Require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
  void Note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

std::string Fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

// Resolves a run config with the shared per-seed convention.
RunConfig SeededConfig(const std::string& json_text, std::uint64_t seed) {
  ConfigOverrides overrides;
  overrides.seed = seed;
  RunConfig cfg = ResolveConfig(json_text, overrides, false);
  if (cfg.data.synth) cfg.data.synth->seed = seed;
  if (cfg.data.corruption) cfg.data.corruption->seed = 100 + seed;
  return cfg;
}

double FinalTestMse(const TrainResult& r) {
  return r.history.epochs.back().test.mse;
}

double MinTestMse(const TrainResult& r) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : r.history.epochs) best = std::min(best, e.test.mse);
  return best;
}

// ---------------------------------------------------------------------------

Verdict EquationConformance() {
  Verdict v;
  const double closed = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  v.Require(std::abs(EntropyOfVariance(1.0) - closed) <= 1e-12,
            "entropy at unit variance");

  // Count covering windows directly for every t below 1000.
  std::size_t grid_points = 0;
  for (std::size_t l = 1; l <= 60; l += 7) {
    for (std::size_t f = 1; f <= 60; f += 7) {
      for (std::size_t t = l; t < 1000; ++t) {
        std::size_t covering = 0;
        for (std::size_t origin = l; origin <= t; ++origin) {
          covering += t < origin + f;
        }
        if (NExpected(t, l, f) != covering) {
          v.Require(false, "n_t at t=" + std::to_string(t));
          return v;
        }
        ++grid_points;
      }
    }
  }

  // Archive variance against a shadow buffer and a two-pass computation.
  const std::size_t length = 300, channels = 2, lookback = 12, horizon = 9;
  ResidualArchive archive(length, channels, lookback, horizon);
  std::vector<std::deque<double>> shadow(length * channels);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(3.0, 2.0);
  std::uniform_int_distribution<std::size_t> pick_t(lookback, length - 1);
  double worst = 0.0;
  for (int i = 0; i < 40000; ++i) {
    const std::size_t t = pick_t(rng);
    const std::size_t c = i % channels;
    const std::size_t cap = archive.Capacity(t);
    if (cap == 0) continue;
    const double r = normal(rng);
    archive.Record(t, c, r);
    auto& buf = shadow[t * channels + c];
    buf.push_back(r);
    if (buf.size() > cap) buf.pop_front();
  }
  for (std::size_t t = lookback; t < length; ++t) {
    for (std::size_t c = 0; c < channels; ++c) {
      const auto& buf = shadow[t * channels + c];
      const auto stats = archive.Variance(t, c);
      if (buf.size() < 2) {
        v.Require(!stats.has_value(), "variance defined below two residuals");
        continue;
      }
      double mean = 0.0;
      for (double x : buf) mean += x;
      mean /= static_cast<double>(buf.size());
      double var = 0.0;
      for (double x : buf) var += (x - mean) * (x - mean);
      var /= static_cast<double>(buf.size());
      worst = std::max(worst, std::abs(stats->variance - var));
    }
  }
  v.Require(worst <= 1e-12, "two-pass variance, max diff " + Fmt(worst));

  // Anomaly score, elementwise and exact.
  bool exact = true;
  for (int trial = 0; trial < 200; ++trial) {
    Matrix rf(24, 3), rg(24, 3);
    for (double& x : rf.values()) x = normal(rng);
    for (double& x : rg.values()) x = normal(rng);
    const Matrix s = AnomalyScores(rf, rg);
    for (std::size_t i = 0; i < s.size(); ++i) {
      exact &= s.values()[i] ==
               std::abs(rf.values()[i]) - std::abs(rg.values()[i]);
    }
  }
  v.Require(exact, "anomaly score elementwise");
  v.Note(std::to_string(grid_points) + " n_t grid points, variance diff " +
         Fmt(worst));
  return v;
}

// ---------------------------------------------------------------------------

Verdict LossReduction() {
  Verdict v;
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> dim(1, 40);
  std::normal_distribution<double> normal;
  double loss_diff = 0.0, grad_diff = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t f = dim(rng), n = 1 + dim(rng) % 8;
    Matrix pred(f, n), target(f, n);
    for (double& x : pred.values()) x = normal(rng);
    for (double& x : target.values()) x = normal(rng);
    const Mask ones = AllKept(f, n);
    // Plain MSE oracle written out here.
    double mse = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
      const double d = pred.values()[k] - target.values()[k];
      mse += d * d;
    }
    mse /= static_cast<double>(pred.size());
    loss_diff = std::max(loss_diff,
                         std::abs(SelectiveLoss(pred, target, ones) - mse));
    const Matrix g = SelectiveLossGrad(pred, target, ones);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double oracle = 2.0 *
                            (pred.values()[k] - target.values()[k]) /
                            static_cast<double>(pred.size());
      grad_diff = std::max(grad_diff, std::abs(g.values()[k] - oracle));
    }
  }
  v.Require(loss_diff <= 1e-12, "all-ones loss equals MSE");
  v.Require(grad_diff <= 1e-12, "all-ones gradient equals MSE gradient");

  const char* config = R"({
    "data": {"synth": {"length": 600, "channels": 2},
             "corruption": {"noise_std": 0.2, "spike_rate": 0.05},
             "lookback": 24, "horizon": 12},
    "model": {"kind": "mlp", "hidden": 32},
    "estimator": {"kernel": 13, "max_epochs": 20},
    "selective": {"ru": 0.0, "ra": 0.0},
    "optimizer": {"epochs": 6, "patience": 0}
  })";
  const RunConfig cfg = SeededConfig(config, 3);
  const PreparedData d = PrepareData(cfg.data);
  TrainRunConfig selective = cfg.train;
  TrainRunConfig plain = cfg.train;
  plain.mode = AblationMode::kPlainMse;
  const TrainResult a = TrainAblation(selective, d.train, d.val, d.test, nullptr);
  const TrainResult b = TrainAblation(plain, d.train, d.val, d.test, nullptr);
  const std::size_t n = d.train.channels();
  v.Require(a.final == b.final && a.best == b.best, "identical parameters");
  v.Require(HistoryCsv(a.history, n) == HistoryCsv(b.history, n),
            "identical history");
  v.Note("max loss diff " + Fmt(loss_diff) + ", grad diff " + Fmt(grad_diff));
  return v;
}

// ---------------------------------------------------------------------------

Verdict GradientCorrectness() {
  Verdict v;
  const ModelKind kinds[] = {ModelKind::kLinear, ModelKind::kDLinear,
                             ModelKind::kMlp};
  double worst = 0.0;
  int cases = 0;
  for (ModelKind kind : kinds) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto c = testing::RandomGradCase(kind, 1000 * seed + 7);
      worst = std::max(worst, testing::MaxGradRelError(c, 1e-5));
      ++cases;
    }
  }
  v.Require(worst < 1e-5, "max relative error " + Fmt(worst));
  v.Note(std::to_string(cases) + " configurations, max relative error " +
         Fmt(worst));
  return v;
}

// ---------------------------------------------------------------------------

Verdict MaskBudgets() {
  Verdict v;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::size_t> horizon(1, 96);
  // Ratios as exact fractions p / q so the oracle count is integer floor.
  const std::pair<std::size_t, std::size_t> ratios[] = {
      {1, 10}, {1, 4}, {1, 2}, {9, 10}};
  std::size_t rows_checked = 0;
  for (const auto& [p, q] : ratios) {
    const double r_a = static_cast<double>(p) / static_cast<double>(q);
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t f = horizon(rng), n = 1 + trial % 3;
      Matrix scores(f, n);
      for (double& x : scores.values()) x = normal(rng);
      const Mask m = AnomalyMask(scores, r_a).mask;
      const std::size_t expected = std::min(p * f / q, f - 1);
      for (std::size_t c = 0; c < n; ++c) {
        std::size_t masked = 0;
        for (std::size_t h = 0; h < f; ++h) masked += m(h, c) == 0;
        if (masked != expected) {
          v.Require(false, "anomaly count at r_a=" + Fmt(r_a) +
                               " F=" + std::to_string(f));
          return v;
        }
        ++rows_checked;
      }
    }
  }

  // Global uncertainty fraction on continuous entropies.
  const std::size_t t = 10000, channels = 2;
  Matrix entropies(t, channels);
  for (double& x : entropies.values()) x = normal(rng);
  double worst = 0.0;
  for (double r_u : {0.05, 0.1, 0.2, 0.3, 0.5}) {
    const UncertaintyThresholds th =
        UpdateUncertaintyThresholds(entropies, r_u, 2);
    const Mask m = UncertaintyMask(entropies, th);
    const double frac = 1.0 - static_cast<double>(KeptCount(m)) /
                                  static_cast<double>(m.size());
    worst = std::max(worst, std::abs(frac - r_u));
  }
  v.Require(worst <= 0.01, "uncertainty fraction off by " + Fmt(worst));

  // Epoch 1 never masks by uncertainty.
  const char* config = R"({
    "data": {"synth": {"length": 500, "channels": 2},
             "corruption": {"noise_std": 0.2},
             "lookback": 24, "horizon": 12},
    "model": {"kind": "linear"},
    "selective": {"ru": 0.5, "ra": 0.0},
    "optimizer": {"epochs": 3, "patience": 0}
  })";
  const RunConfig cfg = SeededConfig(config, 4);
  const PreparedData d = PrepareData(cfg.data);
  const TrainResult r =
      TrainSelective(cfg.train, d.train, d.val, d.test, nullptr);
  v.Require(r.history.epochs[0].frac_uncertainty == 0.0,
            "epoch-1 uncertainty fraction is zero");
  v.Require(r.history.epochs[1].frac_uncertainty > 0.0,
            "uncertainty mask active from epoch 2");
  v.Note(std::to_string(rows_checked) +
         " anomaly rows exact, uncertainty fraction within " + Fmt(worst));
  return v;
}

// ---------------------------------------------------------------------------

Verdict DriftBound() {
  Verdict v;
  DataConfig data;
  SynthConfig synth;
  synth.length = 500;
  synth.channels = 2;
  synth.seed = 11;
  data.synth = synth;
  CorruptionSpec corruption;
  corruption.noise_std = {0.2};
  corruption.spike_rate = 0.05;
  corruption.seed = 12;
  data.corruption = corruption;
  data.split = {1.0, 0.0, 0.0};
  data.lookback = 24;
  data.horizon = 12;
  const WindowedSegment train = PrepareData(data).train;

  Theorem1Config cfg;
  cfg.lr = 1e-3;
  cfg.clip_norm = 1.0;
  cfg.batch_size = 24;
  cfg.epochs = 10;
  cfg.seed = 13;
  const Theorem1Report r = Theorem1Check(cfg, train);
  v.Require(r.iterations_per_epoch >= 18 && r.iterations_per_epoch <= 22,
            "K near 20");
  v.Require(r.epochs == 10 && r.max_gap_per_epoch.size() == 10,
            "ten epochs checked");
  v.Require(r.max_gap <= r.bound && r.pass, "observed gap within bound");

  Theorem1Config frozen = cfg;
  frozen.lr = 0.0;
  const Theorem1Report z = Theorem1Check(frozen, train);
  v.Require(z.max_gap == 0.0 && z.pass, "zero step size gives zero gap");
  v.Note("T=" + std::to_string(train.length()) +
         " K=" + std::to_string(r.iterations_per_epoch) +
         " L_f=" + Fmt(r.lipschitz) + " R=" + Fmt(r.residual_bound) +
         " max_gap=" + Fmt(r.max_gap) + " bound=" + Fmt(r.bound) +
         " timesteps=" + std::to_string(r.checked_timesteps));
  return v;
}

// ---------------------------------------------------------------------------

// A slow learner keeps f's residuals above the estimator's on learnable
// entries, which is the regime where the score separates spikes.
constexpr const char* kSpikeConfig = R"({
  "data": {"synth": {"length": 1200, "channels": 2,
                     "periods": [{"period": 24, "amplitude": [0.5, 1.5]},
                                 {"period": 60, "amplitude": [0.3, 1.0]}]},
           "corruption": {"noise_std": 0.1, "spike_rate": 0.05,
                          "spike_magnitude": [3, 6]},
           "split": [0.6, 0.2, 0.2], "lookback": 48, "horizon": 24},
  "model": {"kind": "mlp", "hidden": 64},
  "estimator": {"kind": "dlinear", "kernel": 25},
  "selective": {"ru": 0.1, "ra": 0.05},
  "optimizer": {"lr": 0.0001, "batch_size": 32, "epochs": 6, "patience": 0}
})";

Verdict AnomalyRecovery() {
  Verdict v;
  double sum_selective = 0.0, sum_random = 0.0;
  for (int s = 1; s <= kSeeds; ++s) {
    const RunConfig cfg = SeededConfig(kSpikeConfig, s);
    const PreparedData d = PrepareData(cfg.data);
    const ForecasterParams g = PretrainEstimator(d.train, cfg.estimator);
    TrainRunConfig t = cfg.train;
    const TrainResult sel = TrainSelective(t, d.train, d.val, d.test, &g);
    t.mode = AblationMode::kRandomMask;
    t.random_mask_fraction = RealizedCombinedFraction(sel.history);
    const TrainResult rnd = TrainSelective(t, d.train, d.val, d.test, &g);
    std::size_t a_masked = 0, a_spikes = 0, r_masked = 0, r_spikes = 0;
    for (std::size_t e = 1; e < sel.history.epochs.size(); ++e) {
      a_masked += sel.history.epochs[e].anomaly_masked;
      a_spikes += sel.history.epochs[e].anomaly_masked_spikes;
      r_masked += rnd.history.epochs[e].combined_masked;
      r_spikes += rnd.history.epochs[e].combined_masked_spikes;
    }
    sum_selective += static_cast<double>(a_spikes) / a_masked;
    sum_random += static_cast<double>(r_spikes) / r_masked;
  }
  const double p_sel = sum_selective / kSeeds, p_rnd = sum_random / kSeeds;
  v.Require(p_sel >= 3.0 * p_rnd, "precision ratio below 3");
  v.Note("anomaly precision " + Fmt(p_sel) + " vs random " + Fmt(p_rnd) +
         " (x" + Fmt(p_sel / p_rnd, 3) + ")");
  return v;
}

// ---------------------------------------------------------------------------

constexpr const char* kOverfitConfig = R"({
  "preset": "ETTh1",
  "data": {"synth": {"length": 600, "channels": 2,
                     "periods": [{"period": 24, "amplitude": [0.5, 1.5]},
                                 {"period": 60, "amplitude": [0.3, 1.0]}]},
           "corruption": {"noise_std": 0.1, "spike_rate": 0.05,
                          "spike_magnitude": [3, 6]},
           "lookback": 48, "horizon": 24},
  "model": {"kind": "mlp", "hidden": 256},
  "estimator": {"kind": "dlinear", "kernel": 25},
  "optimizer": {"lr": 0.001, "batch_size": 32, "epochs": 40, "patience": 0}
})";

Verdict OverfittingMitigation() {
  Verdict v;
  const AblationMode modes[] = {
      AblationMode::kSelective, AblationMode::kUncertaintyOnly,
      AblationMode::kAnomalyOnly, AblationMode::kPlainMse,
      AblationMode::kRandomMask};
  double final_mse[5] = {}, ratio[5] = {};
  for (int s = 1; s <= kSeeds; ++s) {
    const RunConfig cfg = SeededConfig(kOverfitConfig, s);
    const PreparedData d = PrepareData(cfg.data);
    const ForecasterParams g = PretrainEstimator(d.train, cfg.estimator);
    double matched = 0.0;
    for (int m = 0; m < 5; ++m) {
      TrainRunConfig t = cfg.train;
      t.mode = modes[m];
      if (modes[m] == AblationMode::kRandomMask) t.random_mask_fraction = matched;
      const TrainResult r = TrainSelective(t, d.train, d.val, d.test, &g);
      if (m == 0) matched = RealizedCombinedFraction(r.history);
      final_mse[m] += FinalTestMse(r) / kSeeds;
      ratio[m] += FinalTestMse(r) / MinTestMse(r) / kSeeds;
    }
  }
  const double worst_baseline = std::max(final_mse[3], final_mse[4]);
  v.Require(final_mse[0] <= final_mse[1] && final_mse[0] <= final_mse[2],
            "selective not below single-mask ablations");
  v.Require(final_mse[1] <= worst_baseline && final_mse[2] <= worst_baseline,
            "single-mask ablation above max(plain, random)");
  v.Require(ratio[0] <= 1.1, "selective curve diverges");
  v.Require(ratio[3] > ratio[0], "plain final/min not above selective's");
  v.Note("test MSE selective " + Fmt(final_mse[0]) + ", uncertainty_only " +
         Fmt(final_mse[1]) + ", anomaly_only " + Fmt(final_mse[2]) +
         ", plain " + Fmt(final_mse[3]) + ", random " + Fmt(final_mse[4]) +
         "; final/min selective " + Fmt(ratio[0]) + ", plain " +
         Fmt(ratio[3]));
  return v;
}

// ---------------------------------------------------------------------------

constexpr const char* kCleanConfig = R"({
  "data": {"synth": {"length": 1200, "channels": 2,
                     "periods": [{"period": 24, "amplitude": [0.5, 1.5]},
                                 {"period": 60, "amplitude": [0.3, 1.0]}]},
           "split": [0.6, 0.2, 0.2], "lookback": 48, "horizon": 24},
  "model": {"kind": "mlp", "hidden": 64},
  "estimator": {"kind": "dlinear", "kernel": 25},
  "selective": {"ru": 0.2, "ra": 0.1},
  "optimizer": {"lr": 0.001, "batch_size": 32, "epochs": 20, "patience": 0}
})";

Verdict CleanDataSafety() {
  Verdict v;
  double plain = 0.0, anomaly = 0.0, uncertainty = 0.0;
  for (int s = 1; s <= kSeeds; ++s) {
    const RunConfig cfg = SeededConfig(kCleanConfig, s);
    const PreparedData d = PrepareData(cfg.data);
    const ForecasterParams g = PretrainEstimator(d.train, cfg.estimator);
    TrainRunConfig t = cfg.train;
    t.mode = AblationMode::kPlainMse;
    plain += FinalTestMse(TrainSelective(t, d.train, d.val, d.test, &g));
    t.mode = AblationMode::kAnomalyOnly;
    anomaly += FinalTestMse(TrainSelective(t, d.train, d.val, d.test, &g));
    t.mode = AblationMode::kUncertaintyOnly;
    uncertainty += FinalTestMse(TrainSelective(t, d.train, d.val, d.test, &g));
  }
  plain /= kSeeds;
  anomaly /= kSeeds;
  uncertainty /= kSeeds;
  v.Require(std::abs(anomaly - plain) <= 0.05 * plain,
            "anomaly-only not within 5% of unmasked");
  v.Require(uncertainty > plain, "uncertainty-only not worse than unmasked");
  v.Note("test MSE unmasked " + Fmt(plain) + ", anomaly_only(0.1) " +
         Fmt(anomaly) + ", uncertainty_only(0.2) " + Fmt(uncertainty));
  return v;
}

// ---------------------------------------------------------------------------

constexpr const char* kTransferConfig = R"({
  "preset": "ETTh1",
  "data": {"synth": {"length": 1200, "channels": 2,
                     "periods": [{"period": 24, "amplitude": [0.5, 1.5]}]},
           "corruption": {"noise_std": 0.1, "spike_rate": 0.05,
                          "spike_magnitude": [3, 6]},
           "lookback": 48, "horizon": 24},
  "model": {"kind": "mlp", "hidden": 128},
  "estimator": {"kind": "dlinear", "kernel": 25},
  "optimizer": {"lr": 0.001, "batch_size": 32, "epochs": 20, "patience": 0}
})";

Verdict ZeroShotSanity() {
  Verdict v;
  double selective = 0.0, plain = 0.0;
  bool same = true;
  for (int s = 1; s <= kSeeds; ++s) {
    const RunConfig cfg = SeededConfig(kTransferConfig, s);
    const PreparedData a = PrepareData(cfg.data);
    // Dataset B: the same generator with its own seed, uncontaminated, and
    // normalized with its own train statistics.
    DataConfig b_cfg = cfg.data;
    b_cfg.synth->seed = 1000 + s;
    b_cfg.corruption.reset();
    const PreparedData b = PrepareData(b_cfg);
    const ForecasterParams g = PretrainEstimator(a.train, cfg.estimator);
    TrainRunConfig t = cfg.train;
    const TrainResult sel = TrainSelective(t, a.train, a.val, a.test, &g);
    t.mode = AblationMode::kPlainMse;
    const TrainResult pl = TrainSelective(t, a.train, a.val, a.test, &g);
    for (const TrainResult* r : {&sel, &pl}) {
      const Metrics in_domain = Evaluate(r->final, a.test);
      const Metrics self = ZeroShot(r->final, a.test);
      same &= in_domain.mse == self.mse && in_domain.mae == self.mae;
    }
    selective += ZeroShot(sel.final, b.test).mse / kSeeds;
    plain += ZeroShot(pl.final, b.test).mse / kSeeds;
  }
  v.Require(same, "zero_shot(A->A) differs from evaluate");
  v.Require(selective <= plain, "selective transfer above plain");
  v.Note("A->B test MSE selective " + Fmt(selective) + ", plain " +
         Fmt(plain));
  return v;
}

// ---------------------------------------------------------------------------

// Runs the CLI, through the slearn binary when SL_SLEARN is set.
int RunCli(const std::vector<std::string>& args) {
  const char* exe = std::getenv("SL_SLEARN");
  if (exe == nullptr || *exe == '\0') {
    std::ostringstream out, err;
    return Dispatch(args, out, err);
  }
  std::string cmd = std::string("'") + exe + "'";
  for (const auto& a : args) cmd += " '" + a + "'";
  cmd += " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict Reproducibility() {
  Verdict v;
  const fs::path root = fs::current_path() / "acceptance_runs";
  fs::remove_all(root);
  const fs::path config = root / "config.json";
  WriteTextFile(config, R"({
    "preset": "ETTh2",
    "data": {"synth": {"length": 700, "channels": 3},
             "corruption": {"noise_std": [0.1, 0.3, 0.2], "spike_rate": 0.05},
             "lookback": 36, "horizon": 12},
    "model": {"kind": "mlp", "hidden": 32},
    "estimator": {"kernel": 13, "max_epochs": 30},
    "optimizer": {"epochs": 5},
    "threads": 2,
    "outputs": {"mask_audit": true}
  })");
  struct Case {
    std::string name;
    std::vector<std::string> extra;
  };
  const Case cases[] = {
      {"train", {"train", "--seed", "17"}},
      {"random", {"ablate", "--mode", "random_mask", "--seed", "7"}},
  };
  int checked = 0;
  for (const Case& c : cases) {
    const fs::path first = root / (c.name + "_first");
    const fs::path second = root / (c.name + "_second");
    std::vector<std::string> args = c.extra;
    args.insert(args.end(), {"--config", config.string(), "--out",
                             first.string()});
    if (RunCli(args) != 0) {
      v.Require(false, c.name + " run failed");
      continue;
    }
    // Rerun from the resolved config alone. It carries the mode, so train
    // replays a single-mode ablation too.
    const std::vector<std::string> rerun = {
        "train", "--config", (first / "resolved_config.json").string(),
        "--out", second.string()};
    if (RunCli(rerun) != 0) {
      v.Require(false, c.name + " rerun failed");
      continue;
    }
    for (const char* file : {"history.csv", "metrics.json"}) {
      v.Require(ReadTextFile(first / file) == ReadTextFile(second / file),
                c.name + " " + file + " differs");
      ++checked;
    }
  }
  v.Note(std::to_string(checked) + " artifact pairs byte-identical" +
         (std::getenv("SL_SLEARN") ? " via slearn" : " via in-process CLI"));
  return v;
}

}  // namespace
}  // namespace sl

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<sl::Verdict()> run;
  };
  const Criterion criteria[] = {
      {1, "equation conformance", sl::EquationConformance},
      {2, "loss reduction identity", sl::LossReduction},
      {3, "gradient correctness", sl::GradientCorrectness},
      {4, "mask budgets", sl::MaskBudgets},
      {5, "variance drift bound", sl::DriftBound},
      {6, "anomaly recovery", sl::AnomalyRecovery},
      {7, "overfitting mitigation", sl::OverfittingMitigation},
      {8, "clean-data safety", sl::CleanDataSafety},
      {9, "zero-shot sanity", sl::ZeroShotSanity},
      {10, "reproducibility", sl::Reproducibility},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    sl::Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    failures += !v.pass;
    std::printf("%s criterion %d (%s) [%.1fs]: %s\n", v.pass ? "PASS" : "FAIL",
                c.id, c.name, secs, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? 0 : 1;
}

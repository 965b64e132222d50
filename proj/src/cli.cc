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

#include "sl/cli.h"

#include <algorithm>
#include <filesystem>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "sl/artifacts.h"
#include "sl/errors.h"
#include "sl/format.h"
#include "sl/run_config.h"

namespace sl {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonFlags {
  std::string config;
  std::optional<double> ru;
  std::optional<double> ra;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> out;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "run config file (JSON)");
  cmd->add_option("--ru", flags.ru, "uncertainty masking ratio");
  cmd->add_option("--ra", flags.ra, "anomaly masking ratio");
  cmd->add_option("--seed", flags.seed, "base seed");
  cmd->add_option("--mode", flags.mode,
                  "selective | plain_mse | random_mask | uncertainty_only | "
                  "anomaly_only");
  cmd->add_option("--out", flags.out, "output directory");
}

RunConfig Resolve(const CommonFlags& flags) {
  ConfigOverrides overrides;
  overrides.ru = flags.ru;
  overrides.ra = flags.ra;
  overrides.seed = flags.seed;
  overrides.mode = flags.mode;
  if (flags.out) overrides.output_dir = fs::path(*flags.out);
  if (flags.config.empty()) return ResolveConfig("", overrides);
  if (!fs::exists(flags.config)) {
    throw Error("io", "config file not found: " + flags.config);
  }
  return ResolveConfigFile(flags.config, overrides);
}

// Echoes the effective config before any computation.
void WriteResolvedConfig(const RunConfig& cfg) {
  WriteTextFile(cfg.output_dir / "resolved_config.json",
                ResolvedConfigJson(cfg));
}

json MetricsObject(const Metrics& m) {
  return {{"mse", m.mse}, {"mae", m.mae}};
}

bool NeedsEstimator(const TrainRunConfig& t) {
  if (t.EffectiveRatios().anomaly > 0.0) return true;
  // Random masking matched to a selective reference run.
  return t.mode == AblationMode::kRandomMask && !t.random_mask_fraction &&
         t.ratios.anomaly > 0.0;
}

std::optional<ForecasterParams> ObtainEstimator(const RunConfig& cfg,
                                                const PreparedData& data,
                                                const fs::path& run_dir) {
  if (!NeedsEstimator(cfg.train)) return std::nullopt;
  if (cfg.estimator_checkpoint) {
    ForecasterParams g = LoadCheckpoint(*cfg.estimator_checkpoint);
    if (g.shape.lookback != data.train.lookback() ||
        g.shape.horizon != data.train.horizon()) {
      throw ValidationError("estimator checkpoint L/F do not match the data");
    }
    return g;
  }
  ForecasterParams g = PretrainEstimator(data.train, cfg.estimator);
  SaveCheckpoint(run_dir / "estimator.ckpt", g);
  return g;
}

std::string ProgressLine(const EpochRecord& r) {
  return "epoch=" + std::to_string(r.epoch) +
         " loss=" + FormatDouble(r.train_loss) +
         " val_mse=" + FormatDouble(r.val.mse) +
         " frac_u=" + FormatDouble(r.frac_uncertainty) +
         " frac_a=" + FormatDouble(r.frac_anomaly) +
         " frac_m=" + FormatDouble(r.frac_combined);
}

// Full training run into cfg.output_dir.
void RunTraining(const RunConfig& cfg, std::ostream& out) {
  WriteResolvedConfig(cfg);
  const fs::path dir = cfg.output_dir;
  const PreparedData data = PrepareData(cfg.data);
  const auto estimator = ObtainEstimator(cfg, data, dir);

  std::unique_ptr<MaskAuditWriter> audit;
  MaskAuditSink sink;
  if (cfg.mask_audit) {
    audit = std::make_unique<MaskAuditWriter>(dir / "mask_audit.csv");
    sink = audit->Sink();
  }
  const TrainResult result = TrainAblation(
      cfg.train, data.train, data.val, data.test,
      estimator ? &*estimator : nullptr, sink,
      [&out](const EpochRecord& r) { out << ProgressLine(r) << '\n'; });

  SaveCheckpoint(dir / "model.ckpt", result.best);
  WriteTextFile(dir / "history.csv",
                HistoryCsv(result.history, data.train.channels()));
  std::optional<Metrics> original;
  if (cfg.original_scale_metrics && !data.test.empty()) {
    original = Evaluate(result.best, data.test, &data.stats);
  }
  WriteTextFile(dir / "metrics.json",
                MetricsJson(result, cfg.train.mode,
                            RealizedCombinedFraction(result.history),
                            original ? &*original : nullptr));
  if (cfg.theorem1_enabled) {
    WriteTextFile(dir / "theorem1.json",
                  Theorem1Json(Theorem1Check(cfg.theorem1, data.train)));
  }
}

int CmdSynth(const CommonFlags& flags, std::ostream& out) {
  const RunConfig cfg = Resolve(flags);
  if (!cfg.data.synth) {
    throw ValidationError("synth needs a data.synth section");
  }
  WriteResolvedConfig(cfg);
  const RawData raw = LoadRawData(cfg.data);
  WriteCsv(cfg.output_dir / "series.csv", raw.series);
  if (!raw.labels.empty()) {
    std::string text = "t";
    for (const auto& name : raw.series.channel_names()) text += ',' + name;
    text += '\n';
    for (std::size_t t = 0; t < raw.labels.rows(); ++t) {
      text += std::to_string(t);
      for (std::size_t c = 0; c < raw.labels.cols(); ++c) {
        text += ',' + std::to_string(int{raw.labels(t, c)});
      }
      text += '\n';
    }
    WriteTextFile(cfg.output_dir / "labels.csv", text);
  }
  out << "wrote " << (cfg.output_dir / "series.csv").string() << '\n';
  return kExitOk;
}

int CmdPretrain(const CommonFlags& flags, std::ostream& out) {
  const RunConfig cfg = Resolve(flags);
  WriteResolvedConfig(cfg);
  const PreparedData data = PrepareData(cfg.data);
  EstimatorReport report;
  const ForecasterParams g =
      PretrainEstimator(data.train, cfg.estimator, &report);
  SaveCheckpoint(cfg.output_dir / "estimator.ckpt", g);
  json doc = {{"train_mse", report.train_mse},
              {"converged", report.converged},
              {"epochs", report.train_mse.size()}};
  WriteTextFile(cfg.output_dir / "estimator.json", doc.dump(2) + "\n");
  out << "estimator epochs=" << report.train_mse.size()
      << " converged=" << (report.converged ? "true" : "false") << '\n';
  return kExitOk;
}

int CmdTrain(const CommonFlags& flags, std::ostream& out) {
  RunTraining(Resolve(flags), out);
  return kExitOk;
}

int CmdAblate(const CommonFlags& flags, std::ostream& out) {
  RunConfig cfg = Resolve(flags);
  if (flags.mode) {
    RunTraining(cfg, out);
    return kExitOk;
  }
  const fs::path root = cfg.output_dir;
  WriteTextFile(root / "resolved_config.json", ResolvedConfigJson(cfg));
  json summary = json::object();
  for (AblationMode mode :
       {AblationMode::kSelective, AblationMode::kPlainMse,
        AblationMode::kRandomMask, AblationMode::kUncertaintyOnly,
        AblationMode::kAnomalyOnly}) {
    RunConfig run = cfg;
    run.train.mode = mode;
    run.output_dir = root / std::string(AblationModeName(mode));
    out << "mode=" << AblationModeName(mode) << '\n';
    RunTraining(run, out);
    const json metrics =
        json::parse(ReadTextFile(run.output_dir / "metrics.json"));
    summary[std::string(AblationModeName(mode))] = metrics.value("best", json());
  }
  WriteTextFile(root / "ablation.json", summary.dump(2) + "\n");
  return kExitOk;
}

int CmdEvaluate(const CommonFlags& flags, const std::string& checkpoint,
                bool zero_shot, std::ostream& out) {
  const RunConfig cfg = Resolve(flags);
  WriteResolvedConfig(cfg);
  const ForecasterParams params = LoadCheckpoint(checkpoint);
  const PreparedData data = PrepareData(cfg.data);
  json doc;
  if (zero_shot) {
    doc["test"] = MetricsObject(ZeroShot(params, data.test));
  } else {
    if (!data.val.empty()) doc["val"] = MetricsObject(Evaluate(params, data.val));
    doc["test"] = MetricsObject(Evaluate(params, data.test));
    if (cfg.original_scale_metrics) {
      doc["test_original_scale"] =
          MetricsObject(Evaluate(params, data.test, &data.stats));
    }
  }
  const std::string text = doc.dump(2) + "\n";
  WriteTextFile(cfg.output_dir / (zero_shot ? "zero_shot.json"
                                            : "evaluation.json"),
                text);
  out << doc.dump() << '\n';
  return kExitOk;
}

int CmdTheorem1(const CommonFlags& flags, std::ostream& out) {
  RunConfig cfg = Resolve(flags);
  cfg.theorem1_enabled = true;
  WriteResolvedConfig(cfg);
  const PreparedData data = PrepareData(cfg.data);
  const Theorem1Report report = Theorem1Check(cfg.theorem1, data.train);
  WriteTextFile(cfg.output_dir / "theorem1.json", Theorem1Json(report));
  out << "K=" << report.iterations_per_epoch
      << " bound=" << FormatDouble(report.bound)
      << " max_gap=" << FormatDouble(report.max_gap)
      << " pass=" << (report.pass ? "true" : "false") << '\n';
  return kExitOk;
}

int ExitCodeFor(const Error& e) {
  if (e.category() == "usage") return kExitUsage;
  if (e.category() == "validation") return kExitValidation;
  return kExitRuntime;
}

void ReportError(std::ostream& err, const std::string& category,
                 const std::string& message) {
  err << json{{"error", category}, {"message", message}}.dump() << '\n';
}

}  // namespace

int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Selective learning for time series forecasting", "slearn"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string checkpoint;
  std::string run_dir;

  auto* synth = app.add_subcommand("synth", "generate a synthetic series");
  auto* pretrain =
      app.add_subcommand("pretrain-estimator", "pretrain the estimator g");
  auto* train = app.add_subcommand("train", "train f with selective learning");
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint");
  auto* zero_shot =
      app.add_subcommand("zero-shot", "evaluate a checkpoint on foreign data");
  auto* ablate = app.add_subcommand("ablate", "run ablation variants");
  auto* theorem1 =
      app.add_subcommand("theorem1", "check the variance-gap bound");
  auto* export_curves =
      app.add_subcommand("export-curves", "long-format curves from history");
  for (auto* cmd : {synth, pretrain, train, evaluate, zero_shot, ablate,
                    theorem1}) {
    AddCommonFlags(cmd, flags);
  }
  evaluate->add_option("--checkpoint", checkpoint, "model checkpoint")
      ->required();
  zero_shot->add_option("--checkpoint", checkpoint, "model checkpoint")
      ->required();
  export_curves->add_option("--run-dir,run_dir", run_dir, "run directory")
      ->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    ReportError(err, "usage", e.what());
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return CmdSynth(flags, out);
    if (pretrain->parsed()) return CmdPretrain(flags, out);
    if (train->parsed()) return CmdTrain(flags, out);
    if (ablate->parsed()) return CmdAblate(flags, out);
    if (evaluate->parsed()) return CmdEvaluate(flags, checkpoint, false, out);
    if (zero_shot->parsed()) return CmdEvaluate(flags, checkpoint, true, out);
    if (theorem1->parsed()) return CmdTheorem1(flags, out);
    if (export_curves->parsed()) {
      const fs::path written = ExportCurves(run_dir);
      out << "wrote " << written.string() << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    ReportError(err, e.category(), e.what());
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    ReportError(err, "runtime", e.what());
    return kExitRuntime;
  }
  ReportError(err, "usage", "no subcommand");
  return kExitUsage;
}

}  // namespace sl

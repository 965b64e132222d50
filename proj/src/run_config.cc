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

#include "sl/run_config.h"

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "sl/errors.h"

namespace sl {

using nlohmann::json;

const std::vector<Preset>& Presets() {
  static const std::vector<Preset> presets = {
      {"ETTh1", {0.3, 0.3}, {0.6, 0.2, 0.2}},
      {"ETTh2", {0.1, 0.6}, {0.6, 0.2, 0.2}},
      {"ETTm1", {0.2, 0.2}, {0.6, 0.2, 0.2}},
      {"ETTm2", {0.2, 0.5}, {0.6, 0.2, 0.2}},
      {"Electricity", {0.1, 0.1}, {0.7, 0.1, 0.2}},
      // No uncertainty mask for the exchange-rate data.
      {"Exchange", {0.0, 0.9}, {0.7, 0.1, 0.2}},
      {"Weather", {0.1, 0.2}, {0.7, 0.1, 0.2}},
      {"ILI", {0.1, 0.1}, {0.7, 0.1, 0.2}},
  };
  return presets;
}

const Preset& FindPreset(std::string_view name) {
  for (const auto& p : Presets()) {
    if (p.name == name) return p;
  }
  throw ValidationError("unknown preset '" + std::string(name) + "'");
}

namespace {

// Rejects keys outside `allowed`, naming the offending path.
void CheckKeys(const json& obj, const std::string& where,
               std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw ValidationError(where + " must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) {
      throw UsageError("unknown config key '" + where + "." + key + "'");
    }
  }
}

std::string Path(const std::string& where, const char* key) {
  return where + "." + key;
}

double GetDouble(const json& obj, const std::string& where, const char* key,
                 double current) {
  if (!obj.contains(key)) return current;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw ValidationError(Path(where, key) + " must be a number");
  }
  return v.get<double>();
}

std::optional<double> GetOptionalDouble(const json& obj,
                                        const std::string& where,
                                        const char* key,
                                        std::optional<double> current) {
  if (!obj.contains(key)) return current;
  if (obj.at(key).is_null()) return std::nullopt;
  return GetDouble(obj, where, key, 0.0);
}

std::uint64_t GetUnsigned(const json& obj, const std::string& where,
                          const char* key, std::uint64_t current) {
  if (!obj.contains(key)) return current;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned()) {
    throw ValidationError(Path(where, key) + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::size_t GetSize(const json& obj, const std::string& where, const char* key,
                    std::size_t current) {
  return static_cast<std::size_t>(GetUnsigned(obj, where, key, current));
}

bool GetBool(const json& obj, const std::string& where, const char* key,
             bool current) {
  if (!obj.contains(key)) return current;
  const json& v = obj.at(key);
  if (!v.is_boolean()) {
    throw ValidationError(Path(where, key) + " must be a boolean");
  }
  return v.get<bool>();
}

std::string GetString(const json& obj, const std::string& where,
                      const char* key, const std::string& current) {
  if (!obj.contains(key)) return current;
  const json& v = obj.at(key);
  if (!v.is_string()) {
    throw ValidationError(Path(where, key) + " must be a string");
  }
  return v.get<std::string>();
}

Interval GetInterval(const json& obj, const std::string& where,
                     const char* key, Interval current) {
  if (!obj.contains(key)) return current;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number()) {
    throw ValidationError(Path(where, key) + " must be [lo, hi]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

SplitSpec ReadSplit(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) {
    throw ValidationError(where + " must be [train, val, test]");
  }
  for (const auto& x : v) {
    if (!x.is_number()) throw ValidationError(where + " must hold numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

SynthConfig ReadSynth(const json& obj, SynthConfig cfg) {
  const std::string where = "data.synth";
  CheckKeys(obj, where,
            {"length", "channels", "trend_slope", "periods", "random_phase",
             "seed"});
  cfg.length = GetSize(obj, where, "length", cfg.length);
  cfg.channels = GetSize(obj, where, "channels", cfg.channels);
  cfg.trend_slope = GetInterval(obj, where, "trend_slope", cfg.trend_slope);
  cfg.random_phase = GetBool(obj, where, "random_phase", cfg.random_phase);
  cfg.seed = GetUnsigned(obj, where, "seed", cfg.seed);
  if (obj.contains("periods")) {
    const json& arr = obj.at("periods");
    if (!arr.is_array()) throw ValidationError(where + ".periods must be a list");
    cfg.periods.clear();
    for (const auto& item : arr) {
      const std::string w = where + ".periods[]";
      CheckKeys(item, w, {"period", "amplitude"});
      PeriodicComponent pc;
      pc.period = GetSize(item, w, "period", pc.period);
      pc.amplitude = GetInterval(item, w, "amplitude", pc.amplitude);
      cfg.periods.push_back(pc);
    }
  }
  return cfg;
}

CorruptionSpec ReadCorruption(const json& obj, CorruptionSpec spec) {
  const std::string where = "data.corruption";
  CheckKeys(obj, where,
            {"noise_std", "spike_rate", "spike_magnitude", "noise_label_floor",
             "seed"});
  if (obj.contains("noise_std")) {
    const json& v = obj.at("noise_std");
    spec.noise_std.clear();
    if (v.is_number()) {
      spec.noise_std.push_back(v.get<double>());
    } else if (v.is_array()) {
      for (const auto& x : v) {
        if (!x.is_number()) {
          throw ValidationError(where + ".noise_std must hold numbers");
        }
        spec.noise_std.push_back(x.get<double>());
      }
    } else {
      throw ValidationError(where + ".noise_std must be a number or list");
    }
  }
  spec.spike_rate = GetDouble(obj, where, "spike_rate", spec.spike_rate);
  spec.spike_magnitude =
      GetInterval(obj, where, "spike_magnitude", spec.spike_magnitude);
  spec.noise_label_floor =
      GetDouble(obj, where, "noise_label_floor", spec.noise_label_floor);
  spec.seed = GetUnsigned(obj, where, "seed", spec.seed);
  return spec;
}

void ReadData(const json& obj, RunConfig& cfg) {
  const std::string where = "data";
  CheckKeys(obj, where,
            {"csv_path", "synth", "corruption", "split", "lookback",
             "horizon"});
  DataConfig& d = cfg.data;
  if (obj.contains("csv_path")) {
    if (obj.at("csv_path").is_null()) {
      d.csv_path.reset();
    } else {
      d.csv_path = GetString(obj, where, "csv_path", "");
      if (!obj.contains("synth")) d.synth.reset();
    }
  }
  if (obj.contains("synth")) {
    if (obj.at("synth").is_null()) {
      d.synth.reset();
    } else {
      d.synth = ReadSynth(obj.at("synth"), d.synth.value_or(SynthConfig{}));
    }
  }
  if (obj.contains("corruption")) {
    if (obj.at("corruption").is_null()) {
      d.corruption.reset();
    } else {
      d.corruption = ReadCorruption(obj.at("corruption"),
                                    d.corruption.value_or(CorruptionSpec{}));
    }
  }
  if (obj.contains("split")) d.split = ReadSplit(obj.at("split"), "data.split");
  d.lookback = GetSize(obj, where, "lookback", d.lookback);
  d.horizon = GetSize(obj, where, "horizon", d.horizon);
}

ModelKind ReadKind(const json& obj, const std::string& where, ModelKind kind) {
  const std::string name =
      GetString(obj, where, "kind", std::string(ModelKindName(kind)));
  try {
    return ParseModelKind(name);
  } catch (const Error& e) {
    throw ValidationError(where + ".kind: " + e.what());
  }
}

void ReadModel(const json& obj, RunConfig& cfg) {
  const std::string where = "model";
  CheckKeys(obj, where, {"kind", "hidden", "kernel"});
  ModelShape& s = cfg.train.model;
  s.kind = ReadKind(obj, where, s.kind);
  s.hidden = GetSize(obj, where, "hidden", s.hidden);
  s.kernel = GetSize(obj, where, "kernel", s.kernel);
}

void ReadEstimator(const json& obj, RunConfig& cfg) {
  const std::string where = "estimator";
  CheckKeys(obj, where,
            {"kind", "hidden", "kernel", "lr", "batch_size", "tolerance",
             "patience", "max_epochs", "checkpoint"});
  EstimatorConfig& e = cfg.estimator;
  e.shape.kind = ReadKind(obj, where, e.shape.kind);
  e.shape.hidden = GetSize(obj, where, "hidden", e.shape.hidden);
  e.shape.kernel = GetSize(obj, where, "kernel", e.shape.kernel);
  e.optimizer.lr = GetDouble(obj, where, "lr", e.optimizer.lr);
  e.batch_size = GetSize(obj, where, "batch_size", e.batch_size);
  e.tolerance = GetDouble(obj, where, "tolerance", e.tolerance);
  e.patience = GetSize(obj, where, "patience", e.patience);
  e.max_epochs = GetSize(obj, where, "max_epochs", e.max_epochs);
  if (obj.contains("checkpoint")) {
    if (obj.at("checkpoint").is_null()) {
      cfg.estimator_checkpoint.reset();
    } else {
      cfg.estimator_checkpoint = GetString(obj, where, "checkpoint", "");
    }
  }
}

void ReadSelective(const json& obj, RunConfig& cfg) {
  const std::string where = "selective";
  CheckKeys(obj, where, {"ru", "ra", "mode", "random_mask_fraction"});
  TrainRunConfig& t = cfg.train;
  t.ratios.uncertainty = GetDouble(obj, where, "ru", t.ratios.uncertainty);
  t.ratios.anomaly = GetDouble(obj, where, "ra", t.ratios.anomaly);
  if (obj.contains("mode")) {
    try {
      t.mode = ParseAblationMode(GetString(obj, where, "mode", ""));
    } catch (const Error& e) {
      throw ValidationError(std::string("selective.mode: ") + e.what());
    }
  }
  t.random_mask_fraction = GetOptionalDouble(obj, where, "random_mask_fraction",
                                             t.random_mask_fraction);
}

void ReadOptimizer(const json& obj, RunConfig& cfg) {
  const std::string where = "optimizer";
  CheckKeys(obj, where,
            {"kind", "lr", "beta1", "beta2", "eps", "clip", "batch_size",
             "epochs", "patience"});
  TrainRunConfig& t = cfg.train;
  OptimizerConfig& o = t.optimizer;
  if (obj.contains("kind")) {
    try {
      o.kind = ParseOptimizerKind(GetString(obj, where, "kind", ""));
    } catch (const Error& e) {
      throw ValidationError(std::string("optimizer.kind: ") + e.what());
    }
  }
  o.lr = GetDouble(obj, where, "lr", o.lr);
  o.beta1 = GetDouble(obj, where, "beta1", o.beta1);
  o.beta2 = GetDouble(obj, where, "beta2", o.beta2);
  o.eps = GetDouble(obj, where, "eps", o.eps);
  o.clip_norm = GetOptionalDouble(obj, where, "clip", o.clip_norm);
  t.batch_size = GetSize(obj, where, "batch_size", t.batch_size);
  t.epochs = GetSize(obj, where, "epochs", t.epochs);
  t.patience = GetSize(obj, where, "patience", t.patience);
}

void ReadOutputs(const json& obj, RunConfig& cfg) {
  const std::string where = "outputs";
  CheckKeys(obj, where, {"mask_audit", "original_scale_metrics"});
  cfg.mask_audit = GetBool(obj, where, "mask_audit", cfg.mask_audit);
  cfg.original_scale_metrics = GetBool(obj, where, "original_scale_metrics",
                                       cfg.original_scale_metrics);
}

void ReadTheorem1(const json& obj, RunConfig& cfg) {
  const std::string where = "theorem1";
  CheckKeys(obj, where,
            {"enabled", "lr", "clip", "batch_size", "epochs", "max_timesteps",
             "random_probes"});
  Theorem1Config& t = cfg.theorem1;
  cfg.theorem1_enabled = GetBool(obj, where, "enabled", cfg.theorem1_enabled);
  t.lr = GetDouble(obj, where, "lr", t.lr);
  t.clip_norm = GetDouble(obj, where, "clip", t.clip_norm);
  t.batch_size = GetSize(obj, where, "batch_size", t.batch_size);
  t.epochs = GetSize(obj, where, "epochs", t.epochs);
  t.max_timesteps = GetSize(obj, where, "max_timesteps", t.max_timesteps);
  t.random_probes = GetSize(obj, where, "random_probes", t.random_probes);
}

void ApplyPreset(const Preset& preset, RunConfig& cfg) {
  cfg.preset = std::string(preset.name);
  cfg.train.ratios = preset.ratios;
  cfg.data.split = preset.split;
}

// Seeds of the model, estimator and drift-bound check follow the base seed.
void SetSeed(RunConfig& cfg, std::uint64_t seed) {
  cfg.train.seed = seed;
  cfg.estimator.seed = seed;
  cfg.theorem1.seed = seed;
}

std::size_t ParseThreads(const char* text) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text, &end, 10);
  if (end == text || *end != '\0' || v == 0) {
    throw ValidationError(std::string("SL_THREADS must be a positive integer, got '") +
                          text + "'");
  }
  return static_cast<std::size_t>(v);
}

json IntervalJson(Interval i) { return json::array({i.lo, i.hi}); }

json OptionalDouble(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

void RunConfig::Validate() const {
  data.Validate();
  if (data.synth) data.synth->Validate();
  if (data.corruption) data.corruption->Validate();
  train.Validate();
  estimator.shape.Validate();
  estimator.optimizer.Validate();
  if (estimator.batch_size == 0) {
    throw ValidationError("estimator.batch_size must be positive");
  }
  if (estimator.max_epochs == 0) {
    throw ValidationError("estimator.max_epochs must be positive");
  }
  if (!(estimator.tolerance >= 0.0)) {
    throw ValidationError("estimator.tolerance must be >= 0");
  }
  if (theorem1_enabled &&
      (theorem1.batch_size == 0 || theorem1.epochs == 0 ||
       !(theorem1.clip_norm > 0.0) || !(theorem1.lr >= 0.0))) {
    throw ValidationError("theorem1 needs positive batch, epochs and clip");
  }
}

RunConfig ResolveConfig(std::string_view json_text,
                        const ConfigOverrides& overrides,
                        bool read_environment) {
  json doc;
  if (json_text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
      throw ValidationError(std::string("config is not valid JSON: ") +
                            e.what());
    }
  }
  CheckKeys(doc, "config",
            {"preset", "data", "model", "estimator", "selective", "optimizer",
             "seed", "threads", "output_dir", "outputs", "theorem1"});

  RunConfig cfg;
  if (doc.contains("preset") && !doc.at("preset").is_null()) {
    ApplyPreset(FindPreset(GetString(doc, "config", "preset", "")), cfg);
  }
  if (doc.contains("data")) ReadData(doc.at("data"), cfg);
  if (doc.contains("model")) ReadModel(doc.at("model"), cfg);
  if (doc.contains("estimator")) ReadEstimator(doc.at("estimator"), cfg);
  if (doc.contains("selective")) ReadSelective(doc.at("selective"), cfg);
  if (doc.contains("optimizer")) ReadOptimizer(doc.at("optimizer"), cfg);
  if (doc.contains("outputs")) ReadOutputs(doc.at("outputs"), cfg);
  if (doc.contains("theorem1")) ReadTheorem1(doc.at("theorem1"), cfg);
  if (doc.contains("seed")) {
    SetSeed(cfg, GetUnsigned(doc, "config", "seed", 0));
  }
  cfg.train.threads = GetSize(doc, "config", "threads", cfg.train.threads);
  cfg.output_dir =
      GetString(doc, "config", "output_dir", cfg.output_dir.string());

  if (read_environment) {
    if (const char* dir = std::getenv("SL_OUTPUT_DIR"); dir && *dir) {
      cfg.output_dir = dir;
    }
    if (const char* threads = std::getenv("SL_THREADS"); threads && *threads) {
      cfg.train.threads = ParseThreads(threads);
    }
  }

  if (overrides.ru) cfg.train.ratios.uncertainty = *overrides.ru;
  if (overrides.ra) cfg.train.ratios.anomaly = *overrides.ra;
  if (overrides.seed) SetSeed(cfg, *overrides.seed);
  if (overrides.mode) {
    try {
      cfg.train.mode = ParseAblationMode(*overrides.mode);
    } catch (const Error& e) {
      throw ValidationError(std::string("--mode: ") + e.what());
    }
  }
  if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;

  // Window sizes live under data; both models share them.
  cfg.train.model.lookback = cfg.data.lookback;
  cfg.train.model.horizon = cfg.data.horizon;
  cfg.estimator.shape.lookback = cfg.data.lookback;
  cfg.estimator.shape.horizon = cfg.data.horizon;

  cfg.Validate();
  return cfg;
}

RunConfig ResolveConfigFile(const std::filesystem::path& path,
                            const ConfigOverrides& overrides,
                            bool read_environment) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return ResolveConfig(text.str(), overrides, read_environment);
}

std::string ResolvedConfigJson(const RunConfig& cfg) {
  json data;
  data["csv_path"] =
      cfg.data.csv_path ? json(cfg.data.csv_path->string()) : json(nullptr);
  if (cfg.data.synth) {
    const SynthConfig& s = *cfg.data.synth;
    json periods = json::array();
    for (const auto& p : s.periods) {
      periods.push_back(
          {{"period", p.period}, {"amplitude", IntervalJson(p.amplitude)}});
    }
    data["synth"] = {{"length", s.length},
                     {"channels", s.channels},
                     {"trend_slope", IntervalJson(s.trend_slope)},
                     {"periods", periods},
                     {"random_phase", s.random_phase},
                     {"seed", s.seed}};
  } else {
    data["synth"] = nullptr;
  }
  if (cfg.data.corruption) {
    const CorruptionSpec& c = *cfg.data.corruption;
    data["corruption"] = {{"noise_std", c.noise_std},
                          {"spike_rate", c.spike_rate},
                          {"spike_magnitude", IntervalJson(c.spike_magnitude)},
                          {"noise_label_floor", c.noise_label_floor},
                          {"seed", c.seed}};
  } else {
    data["corruption"] = nullptr;
  }
  data["split"] = {cfg.data.split.train, cfg.data.split.val,
                   cfg.data.split.test};
  data["lookback"] = cfg.data.lookback;
  data["horizon"] = cfg.data.horizon;

  const TrainRunConfig& t = cfg.train;
  const EstimatorConfig& e = cfg.estimator;
  json doc;
  doc["preset"] = cfg.preset ? json(*cfg.preset) : json(nullptr);
  doc["data"] = data;
  doc["model"] = {{"kind", ModelKindName(t.model.kind)},
                  {"hidden", t.model.hidden},
                  {"kernel", t.model.kernel}};
  doc["estimator"] = {
      {"kind", ModelKindName(e.shape.kind)},
      {"hidden", e.shape.hidden},
      {"kernel", e.shape.kernel},
      {"lr", e.optimizer.lr},
      {"batch_size", e.batch_size},
      {"tolerance", e.tolerance},
      {"patience", e.patience},
      {"max_epochs", e.max_epochs},
      {"checkpoint", cfg.estimator_checkpoint
                         ? json(cfg.estimator_checkpoint->string())
                         : json(nullptr)}};
  doc["selective"] = {{"ru", t.ratios.uncertainty},
                      {"ra", t.ratios.anomaly},
                      {"mode", AblationModeName(t.mode)},
                      {"random_mask_fraction",
                       OptionalDouble(t.random_mask_fraction)}};
  doc["optimizer"] = {{"kind", OptimizerKindName(t.optimizer.kind)},
                      {"lr", t.optimizer.lr},
                      {"beta1", t.optimizer.beta1},
                      {"beta2", t.optimizer.beta2},
                      {"eps", t.optimizer.eps},
                      {"clip", OptionalDouble(t.optimizer.clip_norm)},
                      {"batch_size", t.batch_size},
                      {"epochs", t.epochs},
                      {"patience", t.patience}};
  doc["seed"] = t.seed;
  doc["threads"] = t.threads;
  doc["output_dir"] = cfg.output_dir.string();
  doc["outputs"] = {{"mask_audit", cfg.mask_audit},
                    {"original_scale_metrics", cfg.original_scale_metrics}};
  doc["theorem1"] = {{"enabled", cfg.theorem1_enabled},
                     {"lr", cfg.theorem1.lr},
                     {"clip", cfg.theorem1.clip_norm},
                     {"batch_size", cfg.theorem1.batch_size},
                     {"epochs", cfg.theorem1.epochs},
                     {"max_timesteps", cfg.theorem1.max_timesteps},
                     {"random_probes", cfg.theorem1.random_probes}};
  return doc.dump(2) + "\n";
}

}  // namespace sl

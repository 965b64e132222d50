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

#include "sl/models.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace sl {

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLinear:
      return "linear";
    case ModelKind::kDLinear:
      return "dlinear";
    case ModelKind::kMlp:
      return "mlp";
  }
  return "unknown";
}

ModelKind ParseModelKind(std::string_view name) {
  if (name == "linear") return ModelKind::kLinear;
  if (name == "dlinear") return ModelKind::kDLinear;
  if (name == "mlp") return ModelKind::kMlp;
  throw ValidationError("unknown model kind '" + std::string(name) + "'");
}

std::vector<TensorBlock> Blocks(const ModelShape& s) {
  const std::size_t l = s.lookback, f = s.horizon, h = s.hidden;
  switch (s.kind) {
    case ModelKind::kLinear:
      return {{"weight", 0, f, l}, {"bias", f * l, f, 1}};
    case ModelKind::kDLinear:
      return {{"trend_weight", 0, f, l},
              {"trend_bias", f * l, f, 1},
              {"remainder_weight", f * l + f, f, l},
              {"remainder_bias", 2 * f * l + f, f, 1}};
    case ModelKind::kMlp:
      return {{"hidden_weight", 0, h, l},
              {"hidden_bias", h * l, h, 1},
              {"output_weight", h * l + h, f, h},
              {"output_bias", h * l + h + f * h, f, 1}};
  }
  return {};
}

std::size_t ModelShape::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& b : Blocks(*this)) n += b.rows * b.cols;
  return n;
}

void ModelShape::Validate() const {
  if (lookback == 0 || horizon == 0) {
    throw ValidationError("model lookback and horizon must be positive");
  }
  if (kind == ModelKind::kMlp && hidden == 0) {
    throw ValidationError("mlp hidden width must be positive");
  }
  if (kind == ModelKind::kDLinear &&
      (kernel == 0 || kernel % 2 == 0 || kernel > 2 * lookback - 1)) {
    throw ValidationError("dlinear kernel must be odd and in [1, 2L-1]");
  }
}

GradientSet ZeroGradient(const ModelShape& shape) {
  return {shape, std::vector<double>(shape.ParameterCount(), 0.0), 0.0};
}

ForecasterParams InitParams(const ModelShape& shape, std::uint64_t seed) {
  shape.Validate();
  ForecasterParams params{shape, seed,
                          std::vector<double>(shape.ParameterCount())};
  std::mt19937_64 rng(seed);
  // Biases share the fan-in of the weight block that precedes them.
  std::size_t fan_in = shape.lookback;
  for (const auto& block : Blocks(shape)) {
    if (block.cols > 1) fan_in = block.cols;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t i = 0; i < block.rows * block.cols; ++i) {
      params.values[block.offset + i] = dist(rng);
    }
  }
  return params;
}

namespace {

void DecomposeInto(std::span<const double> x, std::size_t kernel,
                   std::span<double> trend, std::span<double> remainder) {
  const std::size_t n = x.size();
  const std::size_t half = (kernel - 1) / 2;
  const double inv = 1.0 / static_cast<double>(kernel);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < kernel; ++k) {
      // Padded index i + k maps to source index clamp(i + k - half, 0, n-1).
      const std::ptrdiff_t src =
          static_cast<std::ptrdiff_t>(i + k) - static_cast<std::ptrdiff_t>(half);
      const std::size_t idx =
          src < 0 ? 0
                  : std::min(static_cast<std::size_t>(src), n - 1);
      sum += x[idx];
    }
    trend[i] = sum * inv;
    remainder[i] = x[i] - trend[i];
  }
}

// y += W x, W row-major rows x cols.
void MatVecAdd(const double* w, std::size_t rows, std::size_t cols,
               const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = w + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] += acc;
  }
}

// G += dy x^T.
void OuterAdd(const double* dy, std::size_t rows, const double* x,
              std::size_t cols, double* g) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double d = dy[r];
    if (d == 0.0) continue;
    double* gr = g + r * cols;
    for (std::size_t c = 0; c < cols; ++c) gr[c] += d * x[c];
  }
}

void CheckChannelSpans(const ModelShape& s, std::size_t x, std::size_t y) {
  if (x != s.lookback || y != s.horizon) {
    throw ContractError("channel input/output length does not match model");
  }
}

}  // namespace

Decomposition DecomposeMovingAverage(std::span<const double> window,
                                     std::size_t kernel) {
  if (window.empty()) throw ContractError("empty window");
  if (kernel == 0 || kernel % 2 == 0) {
    throw ContractError("moving-average kernel must be odd");
  }
  if (kernel > 2 * window.size() - 1) {
    throw ContractError("moving-average kernel exceeds 2L-1");
  }
  Decomposition out{std::vector<double>(window.size()),
                    std::vector<double>(window.size())};
  DecomposeInto(window, kernel, out.trend, out.remainder);
  return out;
}

void ForwardChannel(const ForecasterParams& params, std::span<const double> x,
                    std::span<double> y, ModelWorkspace& ws) {
  const ModelShape& s = params.shape;
  CheckChannelSpans(s, x.size(), y.size());
  const double* p = params.values.data();
  const std::size_t l = s.lookback, f = s.horizon;
  switch (s.kind) {
    case ModelKind::kLinear:
      for (std::size_t i = 0; i < f; ++i) y[i] = p[f * l + i];
      MatVecAdd(p, f, l, x.data(), y.data());
      break;
    case ModelKind::kDLinear: {
      ws.trend.resize(l);
      ws.remainder.resize(l);
      DecomposeInto(x, s.kernel, ws.trend, ws.remainder);
      for (std::size_t i = 0; i < f; ++i) {
        y[i] = p[f * l + i] + p[2 * f * l + f + i];
      }
      MatVecAdd(p, f, l, ws.trend.data(), y.data());
      MatVecAdd(p + f * l + f, f, l, ws.remainder.data(), y.data());
      break;
    }
    case ModelKind::kMlp: {
      const std::size_t h = s.hidden;
      ws.hidden.assign(p + h * l, p + h * l + h);
      MatVecAdd(p, h, l, x.data(), ws.hidden.data());
      for (double& v : ws.hidden) v = std::tanh(v);
      const double* w2 = p + h * l + h;
      for (std::size_t i = 0; i < f; ++i) y[i] = w2[f * h + i];
      MatVecAdd(w2, f, h, ws.hidden.data(), y.data());
      break;
    }
  }
}

void AccumulateChannelGradient(const ForecasterParams& params,
                               std::span<const double> x,
                               std::span<const double> dy,
                               std::span<double> grad, ModelWorkspace& ws) {
  const ModelShape& s = params.shape;
  CheckChannelSpans(s, x.size(), dy.size());
  if (grad.size() != params.values.size()) {
    throw ContractError("gradient buffer does not match parameter count");
  }
  const double* p = params.values.data();
  double* g = grad.data();
  const std::size_t l = s.lookback, f = s.horizon;
  switch (s.kind) {
    case ModelKind::kLinear:
      OuterAdd(dy.data(), f, x.data(), l, g);
      for (std::size_t i = 0; i < f; ++i) g[f * l + i] += dy[i];
      break;
    case ModelKind::kDLinear:
      ws.trend.resize(l);
      ws.remainder.resize(l);
      DecomposeInto(x, s.kernel, ws.trend, ws.remainder);
      OuterAdd(dy.data(), f, ws.trend.data(), l, g);
      OuterAdd(dy.data(), f, ws.remainder.data(), l, g + f * l + f);
      for (std::size_t i = 0; i < f; ++i) {
        g[f * l + i] += dy[i];
        g[2 * f * l + f + i] += dy[i];
      }
      break;
    case ModelKind::kMlp: {
      const std::size_t h = s.hidden;
      ws.hidden.assign(p + h * l, p + h * l + h);
      MatVecAdd(p, h, l, x.data(), ws.hidden.data());
      for (double& v : ws.hidden) v = std::tanh(v);
      const double* w2 = p + h * l + h;
      double* g2 = g + h * l + h;
      OuterAdd(dy.data(), f, ws.hidden.data(), h, g2);
      for (std::size_t i = 0; i < f; ++i) g2[f * h + i] += dy[i];
      // delta = (W2^T dy) * (1 - tanh^2)
      ws.delta.assign(h, 0.0);
      for (std::size_t i = 0; i < f; ++i) {
        const double d = dy[i];
        if (d == 0.0) continue;
        const double* w2r = w2 + i * h;
        for (std::size_t j = 0; j < h; ++j) ws.delta[j] += w2r[j] * d;
      }
      for (std::size_t j = 0; j < h; ++j) {
        ws.delta[j] *= 1.0 - ws.hidden[j] * ws.hidden[j];
      }
      OuterAdd(ws.delta.data(), h, x.data(), l, g);
      for (std::size_t j = 0; j < h; ++j) g[h * l + j] += ws.delta[j];
      break;
    }
  }
}

Matrix Forward(const ForecasterParams& params, const Matrix& input) {
  const ModelShape& s = params.shape;
  if (input.rows() != s.lookback || input.cols() == 0) {
    throw ContractError("forward input must be L x N with N >= 1");
  }
  Matrix out(s.horizon, input.cols());
  ModelWorkspace ws;
  std::vector<double> y(s.horizon);
  for (std::size_t c = 0; c < input.cols(); ++c) {
    auto x = input.column(c);
    ForwardChannel(params, x, y, ws);
    for (std::size_t i = 0; i < s.horizon; ++i) out(i, c) = y[i];
  }
  return out;
}

GradientSet Backward(const ForecasterParams& params, const Matrix& input,
                     const Matrix& upstream) {
  const ModelShape& s = params.shape;
  if (input.rows() != s.lookback || upstream.rows() != s.horizon ||
      input.cols() != upstream.cols()) {
    throw ContractError("backward expects L x N input and F x N upstream");
  }
  GradientSet grads = ZeroGradient(s);
  ModelWorkspace ws;
  for (std::size_t c = 0; c < input.cols(); ++c) {
    auto x = input.column(c);
    auto dy = upstream.column(c);
    AccumulateChannelGradient(params, x, dy, grads.values, ws);
  }
  return grads;
}

namespace {

constexpr char kMagic[8] = {'S', 'L', 'C', 'K', 'P', 'T', '0', '1'};

void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t U64() { return Uint(8); }
  std::uint32_t U32() { return static_cast<std::uint32_t>(Uint(4)); }
  std::string_view Raw(std::size_t n) {
    Need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error("checkpoint", "checkpoint is truncated");
    }
  }
  std::uint64_t Uint(int width) {
    Need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SerializeCheckpoint(const ForecasterParams& params) {
  std::string out(kMagic, sizeof(kMagic));
  const ModelShape& s = params.shape;
  PutU32(out, static_cast<std::uint32_t>(s.kind));
  PutU32(out, 0);
  PutU64(out, s.lookback);
  PutU64(out, s.horizon);
  PutU64(out, s.hidden);
  PutU64(out, s.kernel);
  PutU64(out, params.seed);
  PutU64(out, params.values.size());
  for (double v : params.values) PutU64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

ForecasterParams DeserializeCheckpoint(std::string_view bytes) {
  Reader in(bytes);
  if (in.Raw(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw Error("checkpoint", "bad checkpoint magic");
  }
  ForecasterParams params;
  const std::uint32_t kind = in.U32();
  if (kind > static_cast<std::uint32_t>(ModelKind::kMlp)) {
    throw Error("checkpoint", "unknown model kind tag");
  }
  in.U32();
  params.shape.kind = static_cast<ModelKind>(kind);
  params.shape.lookback = in.U64();
  params.shape.horizon = in.U64();
  params.shape.hidden = in.U64();
  params.shape.kernel = in.U64();
  params.seed = in.U64();
  const std::uint64_t count = in.U64();
  params.shape.Validate();
  if (count != params.shape.ParameterCount()) {
    throw Error("checkpoint", "value count does not match shape header");
  }
  params.values.resize(count);
  for (auto& v : params.values) v = std::bit_cast<double>(in.U64());
  if (!in.AtEnd()) throw Error("checkpoint", "trailing bytes in checkpoint");
  return params;
}

void SaveCheckpoint(const std::filesystem::path& path,
                    const ForecasterParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  const std::string bytes = SerializeCheckpoint(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ForecasterParams LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return DeserializeCheckpoint(buf.str());
}

}  // namespace sl

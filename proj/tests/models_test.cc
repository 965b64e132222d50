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

#include <random>

#include "gradcheck.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace sl {
namespace {

const TensorBlock& Block(const std::vector<TensorBlock>& blocks,
                         std::string_view name) {
  for (const auto& b : blocks) {
    if (b.name == name) return b;
  }
  throw std::runtime_error("no block " + std::string(name));
}

ForecasterParams Zeros(ModelShape shape) {
  ForecasterParams p;
  p.shape = shape;
  p.values.assign(shape.ParameterCount(), 0.0);
  return p;
}

TEST(ModelShapeTest, ParameterCounts) {
  EXPECT_EQ((ModelShape{ModelKind::kLinear, 5, 3, 0, 1}.ParameterCount()),
            5u * 3 + 3);
  EXPECT_EQ((ModelShape{ModelKind::kDLinear, 5, 3, 0, 3}.ParameterCount()),
            2u * (5 * 3 + 3));
  EXPECT_EQ((ModelShape{ModelKind::kMlp, 5, 3, 4, 1}.ParameterCount()),
            4u * 5 + 4 + 3 * 4 + 3);
}

TEST(ModelShapeTest, Validation) {
  EXPECT_THROW((ModelShape{ModelKind::kDLinear, 5, 3, 0, 2}.Validate()),
               ValidationError);
  EXPECT_THROW((ModelShape{ModelKind::kDLinear, 5, 3, 0, 11}.Validate()),
               ValidationError);
  EXPECT_THROW((ModelShape{ModelKind::kMlp, 5, 3, 0, 1}.Validate()),
               ValidationError);
  EXPECT_THROW(ParseModelKind("transformer"), ValidationError);
  EXPECT_EQ(ParseModelKind("dlinear"), ModelKind::kDLinear);
}

TEST(ForwardTest, ZeroWeightLinearOutputsBias) {
  const ModelShape shape{ModelKind::kLinear, 4, 3, 0, 1};
  ForecasterParams p = Zeros(shape);
  const auto& b = Block(Blocks(shape), "bias");
  for (std::size_t i = 0; i < 3; ++i) p.values[b.offset + i] = 1.5 + i;
  std::mt19937_64 rng(1);
  const Matrix y = Forward(p, testing::RandomMatrix(4, 2, rng));
  for (std::size_t h = 0; h < 3; ++h) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(y(h, c), 1.5 + h);
  }
}

TEST(ForwardTest, IdentityLinearRepeatsInput) {
  const ModelShape shape{ModelKind::kLinear, 4, 4, 0, 1};
  ForecasterParams p = Zeros(shape);
  const auto& w = Block(Blocks(shape), "weight");
  for (std::size_t i = 0; i < 4; ++i) p.values[w.offset + i * 4 + i] = 1.0;
  std::mt19937_64 rng(2);
  const Matrix x = testing::RandomMatrix(4, 3, rng);
  EXPECT_EQ(Forward(p, x), x);
}

TEST(ForwardTest, MlpWithZeroHiddenWeightsOutputsBias) {
  const ModelShape shape{ModelKind::kMlp, 6, 2, 5, 1};
  ForecasterParams p = InitParams(shape, 3);
  const auto blocks = Blocks(shape);
  const auto& w1 = Block(blocks, "hidden_weight");
  const auto& b1 = Block(blocks, "hidden_bias");
  const auto& b2 = Block(blocks, "output_bias");
  for (std::size_t i = 0; i < w1.rows * w1.cols; ++i) p.values[w1.offset + i] = 0;
  for (std::size_t i = 0; i < b1.rows * b1.cols; ++i) p.values[b1.offset + i] = 0;
  std::mt19937_64 rng(4);
  const Matrix y1 = Forward(p, testing::RandomMatrix(6, 2, rng));
  const Matrix y2 = Forward(p, testing::RandomMatrix(6, 2, rng));
  for (std::size_t h = 0; h < 2; ++h) {
    EXPECT_EQ(y1(h, 0), p.values[b2.offset + h]);
    EXPECT_EQ(y2(h, 1), p.values[b2.offset + h]);
  }
}

TEST(DecomposeTest, Examples) {
  const std::vector<double> constant{5, 5, 5, 5};
  const Decomposition d = DecomposeMovingAverage(constant, 3);
  EXPECT_EQ(d.trend, constant);
  EXPECT_EQ(d.remainder, std::vector<double>(4, 0.0));

  const std::vector<double> x{0.3, -1.0, 2.5};
  const Decomposition id = DecomposeMovingAverage(x, 1);
  EXPECT_EQ(id.trend, x);
  EXPECT_EQ(id.remainder, std::vector<double>(3, 0.0));

  const Decomposition p = DecomposeMovingAverage(std::vector<double>{0, 3, 0}, 3);
  for (double v : p.trend) EXPECT_NEAR(v, 1.0, 1e-15);
  EXPECT_NEAR(p.remainder[0], -1.0, 1e-15);
  EXPECT_NEAR(p.remainder[1], 2.0, 1e-15);
  EXPECT_NEAR(p.remainder[2], -1.0, 1e-15);
}

// Independent oracle: explicit replicate-padded array and a plain average.
TEST(DecomposeTest, MatchesPaddedOracle) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  for (std::size_t l : {1u, 2u, 5u, 9u}) {
    for (std::size_t k = 1; k <= 2 * l - 1; k += 2) {
      std::vector<double> x(l);
      for (double& v : x) v = normal(rng);
      const std::size_t half = (k - 1) / 2;
      std::vector<double> padded(half, x.front());
      padded.insert(padded.end(), x.begin(), x.end());
      padded.insert(padded.end(), half, x.back());
      const Decomposition d = DecomposeMovingAverage(x, k);
      for (std::size_t i = 0; i < l; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += padded[i + j];
        EXPECT_NEAR(d.trend[i], s / static_cast<double>(k), 1e-12);
        EXPECT_NEAR(d.trend[i] + d.remainder[i], x[i], 1e-12);
      }
    }
  }
}

// With kernel 1 the trend is the input itself and the remainder vanishes, so
// only the trend weights and both biases act.
TEST(DLinearTest, KernelOneReducesToTrendMap) {
  const ModelShape shape{ModelKind::kDLinear, 5, 3, 0, 1};
  const ForecasterParams p = InitParams(shape, 12);
  const auto blocks = Blocks(shape);
  const ModelShape lin{ModelKind::kLinear, 5, 3, 0, 1};
  ForecasterParams merged = Zeros(lin);
  const auto& wt = Block(blocks, "trend_weight");
  const auto& bt = Block(blocks, "trend_bias");
  const auto& br = Block(blocks, "remainder_bias");
  const auto lb = Blocks(lin);
  for (std::size_t i = 0; i < 15; ++i) {
    merged.values[Block(lb, "weight").offset + i] =
        p.values[wt.offset + i];
  }
  for (std::size_t i = 0; i < 3; ++i) {
    merged.values[Block(lb, "bias").offset + i] =
        p.values[bt.offset + i] + p.values[br.offset + i];
  }
  std::mt19937_64 rng(13);
  const Matrix x = testing::RandomMatrix(5, 2, rng);
  const Matrix a = Forward(p, x);
  const Matrix b = Forward(merged, x);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a.values()[i], b.values()[i], 1e-12);
  }
}

TEST(DLinearTest, ZeroRemainderBranchIsTrendOnlyLinear) {
  const ModelShape shape{ModelKind::kDLinear, 7, 2, 0, 3};
  ForecasterParams p = InitParams(shape, 21);
  const auto blocks = Blocks(shape);
  for (const char* name : {"remainder_weight", "remainder_bias"}) {
    const auto& blk = Block(blocks, name);
    for (std::size_t i = 0; i < blk.rows * blk.cols; ++i) {
      p.values[blk.offset + i] = 0.0;
    }
  }
  const auto& wt = Block(blocks, "trend_weight");
  const auto& bt = Block(blocks, "trend_bias");
  std::mt19937_64 rng(22);
  const Matrix x = testing::RandomMatrix(7, 1, rng);
  const Decomposition d = DecomposeMovingAverage(x.column(0), 3);
  const Matrix y = Forward(p, x);
  for (std::size_t h = 0; h < 2; ++h) {
    double s = p.values[bt.offset + h];
    for (std::size_t j = 0; j < 7; ++j) {
      s += p.values[wt.offset + h * 7 + j] * d.trend[j];
    }
    EXPECT_NEAR(y(h, 0), s, 1e-12);
  }
}

TEST(BackwardTest, ZeroUpstreamGivesZeroGradient) {
  for (ModelKind kind : {ModelKind::kLinear, ModelKind::kDLinear, ModelKind::kMlp}) {
    const testing::GradCheckCase c = testing::RandomGradCase(kind, 5);
    const GradientSet g = Backward(
        c.params, c.input, Matrix(c.target.rows(), c.target.cols(), 0.0));
    for (double v : g.values) EXPECT_EQ(v, 0.0);
  }
}

TEST(BackwardTest, LinearOneStepChainRule) {
  const ModelShape shape{ModelKind::kLinear, 2, 1, 0, 1};
  const ForecasterParams p = InitParams(shape, 1);
  const GradientSet g =
      Backward(p, Matrix(2, 1, std::vector<double>{1, 2}),
               Matrix(1, 1, std::vector<double>{3}));
  EXPECT_EQ(g.values, (std::vector<double>{3, 6, 3}));
}

TEST(BackwardTest, MatchesFiniteDifferencesForEveryKind) {
  for (ModelKind kind : {ModelKind::kLinear, ModelKind::kDLinear, ModelKind::kMlp}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto c = testing::RandomGradCase(kind, 1000 + seed);
      EXPECT_LT(testing::MaxGradRelError(c), 1e-5)
          << ModelKindName(kind) << " seed " << seed;
    }
  }
}

TEST(BackwardTest, MaskedEntriesContributeNothing) {
  for (ModelKind kind : {ModelKind::kLinear, ModelKind::kDLinear, ModelKind::kMlp}) {
    auto c = testing::RandomGradCase(kind, 77);
    const Matrix pred = Forward(c.params, c.input);
    const GradientSet base =
        Backward(c.params, c.input, SelectiveLossGrad(pred, c.target, c.mask));
    // Moving the target of a masked entry must not change the gradient.
    for (std::size_t i = 0; i < c.mask.size(); ++i) {
      if (c.mask.values()[i] == 0) c.target.values()[i] += 100.0;
    }
    const GradientSet moved =
        Backward(c.params, c.input, SelectiveLossGrad(pred, c.target, c.mask));
    EXPECT_EQ(base.values, moved.values) << ModelKindName(kind);
  }
}

TEST(ChannelIndependenceTest, PermutingChannelsPermutesOutputs) {
  for (ModelKind kind : {ModelKind::kLinear, ModelKind::kDLinear, ModelKind::kMlp}) {
    const ModelShape shape{kind, 8, 4, kind == ModelKind::kMlp ? 6u : 0u,
                           kind == ModelKind::kDLinear ? 5u : 1u};
    const ForecasterParams p = InitParams(shape, 31);
    std::mt19937_64 rng(32);
    const Matrix x = testing::RandomMatrix(8, 3, rng);
    const std::size_t perm[] = {2, 0, 1};
    Matrix xp(8, 3);
    for (std::size_t r = 0; r < 8; ++r) {
      for (std::size_t c = 0; c < 3; ++c) xp(r, c) = x(r, perm[c]);
    }
    const Matrix y = Forward(p, x);
    const Matrix yp = Forward(p, xp);
    for (std::size_t h = 0; h < 4; ++h) {
      for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(yp(h, c), y(h, perm[c]));
    }
  }
}

TEST(InitTest, DeterministicAndBounded) {
  const ModelShape shape{ModelKind::kMlp, 10, 4, 8, 1};
  const ForecasterParams a = InitParams(shape, 5);
  EXPECT_EQ(a, InitParams(shape, 5));
  EXPECT_NE(a.values, InitParams(shape, 6).values);
  for (const auto& blk : Blocks(shape)) {
    const double bound =
        1.0 / std::sqrt(static_cast<double>(blk.name == "hidden_weight" || blk.name == "hidden_bias"
                                                ? 10
                                                : 8));
    for (std::size_t i = 0; i < blk.rows * blk.cols; ++i) {
      EXPECT_LE(std::abs(a.values[blk.offset + i]), bound);
    }
  }
}

TEST(CheckpointTest, RoundTripIsExact) {
  for (ModelKind kind : {ModelKind::kLinear, ModelKind::kDLinear, ModelKind::kMlp}) {
    const auto c = testing::RandomGradCase(kind, 44);
    const auto path = testing::TempDir() /
                      (std::string(ModelKindName(kind)) + ".ckpt");
    SaveCheckpoint(path, c.params);
    EXPECT_EQ(LoadCheckpoint(path), c.params);
  }
}

TEST(CheckpointTest, LayoutAndCorruption) {
  const ForecasterParams p = InitParams({ModelKind::kLinear, 2, 1, 0, 1}, 9);
  const std::string bytes = SerializeCheckpoint(p);
  EXPECT_EQ(bytes.substr(0, 8), "SLCKPT01");
  EXPECT_EQ(bytes.size(), 8u + 4 + 4 + 6 * 8 + 3 * 8);
  EXPECT_THROW(DeserializeCheckpoint(bytes.substr(0, bytes.size() - 1)), Error);
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(DeserializeCheckpoint(bad), Error);
}

}  // namespace
}  // namespace sl

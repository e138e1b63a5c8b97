// Copyright 2026 The fieldctr Authors. All rights reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fieldctr/errors.h"
#include "fieldctr/fwbi.h"
#include "fieldctr/train.h"
#include "test_util.h"

namespace fieldctr {
namespace {

FieldSchema TwoFields() {
  return parse_schema(
      "hierarchies: u, i\n"
      "user, 10, one-hot, u, dict\n"
      "item, 10, one-hot, i, dict\n");
}

// Label = user < 5: separable by the linear part alone.
Dataset Separable(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Dataset d(2);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto u = static_cast<std::uint32_t>(rng() % 10);
    const auto i = static_cast<std::uint32_t>(rng() % 10);
    d.add(make_instance(u < 5 ? 1.0f : 0.0f, {{u}, {i}}).view());
  }
  return d;
}

ModelOptions Small() {
  ModelOptions o;
  o.embed_dim = 8;
  o.mlp = {16, 8};
  return o;
}

TEST(ShuffledOrder, IsAPermutation) {
  auto rng = derive_rng(1, 0, 0);
  auto order = shuffled_order(1000, rng);
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> expect(1000);
  std::iota(expect.begin(), expect.end(), 0);
  EXPECT_EQ(sorted, expect);
  EXPECT_NE(order, expect);
  auto again = derive_rng(1, 0, 0);
  EXPECT_EQ(shuffled_order(1000, again), order);
}

TEST(DeriveRng, StreamsDiffer) {
  auto a = derive_rng(1, 0, 0);
  auto b = derive_rng(1, 0, 1);
  auto c = derive_rng(1, 1, 0);
  auto d = derive_rng(2, 0, 0);
  const auto x = a();
  EXPECT_NE(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(TrainEpoch, EmptyDataThrows) {
  Model<double> model(TwoFields(), Small());
  model.initialize(1);
  Trainer<double> trainer(model, {});
  EXPECT_THROW(trainer.train_epoch(Dataset(2)), EmptyData);
}

TEST(TrainEpoch, MemorizesSingleExample) {
  Model<double> model(TwoFields(), Small());
  model.initialize(3);
  Dataset d(2);
  d.add(make_instance(1, {{2}, {7}}).view());
  Trainer<double> trainer(model, {.learning_rate = 0.1, .batch_size = 1});
  EpochSummary last;
  for (int e = 0; e < 200; ++e) last = trainer.train_epoch(d);
  EXPECT_LT(last.mean_logloss, 0.01);
  EXPECT_EQ(trainer.state().epoch, 200u);
  EXPECT_EQ(trainer.state().step, 200u);
}

TEST(TrainEpoch, BetaOneMatchesDiceFactorOff) {
  const auto data = Separable(300, 4);
  auto with_beta = Small();
  with_beta.dice.beta = 1.0;
  auto off = Small();
  off.dice.enabled = false;
  Model<double> a(TwoFields(), with_beta);
  Model<double> b(TwoFields(), off);
  a.initialize(9);
  b.initialize(9);
  Trainer<double> ta(a, {.batch_size = 32, .seed = 5});
  Trainer<double> tb(b, {.batch_size = 32, .seed = 5});
  for (int e = 0; e < 3; ++e) {
    ta.train_epoch(data);
    tb.train_epoch(data);
    EXPECT_EQ(a.embedding(), b.embedding());
    EXPECT_EQ(a.fwbi(), b.fwbi());
    EXPECT_EQ(a.mlp(), b.mlp());
    EXPECT_EQ(a.head(), b.head());
  }
}

TEST(TrainEpoch, FiniteLossFromZeroEmbeddings) {
  Model<float> model(TwoFields(), Small());
  model.initialize(1);
  for (std::size_t n = 0; n < 2; ++n) {
    std::fill(model.embedding().matrix(n).begin(), model.embedding().matrix(n).end(), 0.0f);
  }
  Trainer<float> trainer(model, {.batch_size = 64});
  const auto s = trainer.train_epoch(Separable(256, 1));
  EXPECT_TRUE(std::isfinite(s.mean_logloss));
}

TEST(TrainEpoch, LossDecreasesOnSeparableData) {
  const auto data = Separable(4000, 11);
  Model<double> model(TwoFields(), Small());
  model.initialize(2);
  Trainer<double> trainer(model, {.learning_rate = 0.05, .batch_size = 128, .seed = 3});
  double previous = INFINITY;
  for (int e = 0; e < 5; ++e) {
    const double loss = trainer.train_epoch(data).mean_logloss;
    EXPECT_LT(loss, previous) << "epoch " << e + 1;
    previous = loss;
  }
}

TEST(TrainEpoch, SeededRunsAreBitIdentical) {
  const auto data = Separable(500, 6);
  const auto run = [&] {
    Model<float> model(TwoFields(), Small());
    model.initialize(17);
    Trainer<float> trainer(model, {.batch_size = 50, .seed = 23});
    for (int e = 0; e < 2; ++e) trainer.train_epoch(data);
    return std::pair{model, trainer.state()};
  };
  const auto [m1, s1] = run();
  const auto [m2, s2] = run();
  EXPECT_TRUE(m1 == m2);
  EXPECT_TRUE(s1 == s2);
}

TEST(TrainEpoch, ResumingFromStateContinuesTheSameTrajectory) {
  const auto data = Separable(400, 8);
  Model<double> straight(TwoFields(), Small());
  straight.initialize(4);
  Model<double> resumed = straight;
  Trainer<double> t1(straight, {.batch_size = 40, .seed = 2});
  t1.train_epoch(data);
  t1.train_epoch(data);

  TrainState<double> state;
  {
    Trainer<double> first(resumed, {.batch_size = 40, .seed = 2});
    first.train_epoch(data);
    state = first.state();
  }
  Trainer<double> second(resumed, {.batch_size = 40, .seed = 2}, state);
  second.train_epoch(data);
  EXPECT_TRUE(straight == resumed);
  EXPECT_TRUE(t1.state() == second.state());
}

TEST(TrainEpoch, StepCallbackSeesEveryStep) {
  const auto data = Separable(130, 2);
  Model<double> model(TwoFields(), Small());
  model.initialize(1);
  Trainer<double> trainer(model, {.batch_size = 50});
  std::vector<std::uint64_t> steps;
  const auto s = trainer.train_epoch(data, [&](std::uint64_t step, double loss) {
    steps.push_back(step);
    EXPECT_TRUE(std::isfinite(loss));
  });
  EXPECT_EQ(steps, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(s.steps, 3u);
  EXPECT_EQ(s.examples, 130u);
}

TEST(TrainState, AccumulatorsNondecreasing) {
  const auto data = Separable(300, 3);
  Model<double> model(TwoFields(), Small());
  model.initialize(1);
  Trainer<double> trainer(model, {.batch_size = 30});
  auto prev = trainer.state();
  for (int e = 0; e < 3; ++e) {
    trainer.train_epoch(data);
    const auto& cur = trainer.state();
    for (std::size_t l = 0; l < cur.mlp.size(); ++l) {
      for (std::size_t i = 0; i < cur.mlp[l].weight.size(); ++i) {
        EXPECT_GE(cur.mlp[l].weight[i], prev.mlp[l].weight[i]);
        EXPECT_GE(cur.mlp[l].weight[i], 0.0);
      }
    }
    for (std::size_t i = 0; i < cur.r.size(); ++i) EXPECT_GE(cur.r[i], prev.r[i]);
    for (std::size_t i = 0; i < cur.head.size(); ++i) EXPECT_GE(cur.head[i], prev.head[i]);
    prev = cur;
  }
}

}  // namespace
}  // namespace fieldctr

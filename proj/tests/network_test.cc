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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fieldctr/errors.h"
#include "fieldctr/fwbi.h"
#include "fieldctr/network.h"
#include "fieldctr/train.h"
#include "gradcheck.h"
#include "test_util.h"

namespace fieldctr {
namespace {

ModelOptions WithDim(std::size_t dim) {
  ModelOptions o;
  o.embed_dim = dim;
  return o;
}

using Vec = std::vector<double>;

MlpParams<double> OneLayer(std::size_t in, std::size_t out) {
  const std::vector<std::size_t> widths{out};
  return MlpParams<double>(in, widths);
}

TEST(MlpForward, ReluOfBias) {
  auto p = OneLayer(3, 2);
  p.layers[0].bias = {1, -1};
  MlpTrace<double> t;
  mlp_forward<double>(p, Vec{4, 5, 6}, t);
  EXPECT_EQ(Vec(t.output().begin(), t.output().end()), (Vec{1, 0}));
}

TEST(MlpForward, IdentityPassesNonnegativeInput) {
  auto p = OneLayer(3, 3);
  p.layers[0].weight = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  MlpTrace<double> t;
  mlp_forward<double>(p, Vec{0.5, 0, 2}, t);
  EXPECT_EQ(Vec(t.output().begin(), t.output().end()), (Vec{0.5, 0, 2}));
}

TEST(MlpForward, ClipsNegative) {
  auto p = OneLayer(2, 1);
  p.layers[0].weight = {1, 1};
  p.layers[0].bias = {-3};
  MlpTrace<double> t;
  mlp_forward<double>(p, Vec{1, 1}, t);
  EXPECT_EQ(t.output()[0], 0.0);
}

TEST(MlpForward, ShapeMismatch) {
  auto p = OneLayer(3, 2);
  MlpTrace<double> t;
  EXPECT_THROW(mlp_forward<double>(p, Vec{1, 2}, t), ShapeMismatch);
}

TEST(MlpForward, EmptyTowerHasEmptyOutput) {
  MlpParams<double> p(4, std::vector<std::size_t>{});
  MlpTrace<double> t;
  mlp_forward<double>(p, Vec{1, 2, 3, 4}, t);
  EXPECT_TRUE(t.output().empty());
  EXPECT_EQ(p.output_width(), 0u);
}

TEST(Logloss, Examples) {
  EXPECT_NEAR(logloss(1, 1 - 1e-12), 0.0, 1e-11);
  EXPECT_NEAR(logloss(1, 0.5), 0.693147, 1e-6);
  EXPECT_NEAR(logloss(0, 0.5), 0.693147, 1e-6);
  EXPECT_THROW(logloss(1, 0.0), DomainError);
  EXPECT_THROW(logloss(1, 1.0), DomainError);
  EXPECT_THROW(logloss(0, -0.2), DomainError);
}

ModelOptions Plain(std::size_t dim, Activation act = Activation::kIdentity) {
  ModelOptions o;
  o.embed_dim = dim;
  o.mlp.clear();
  o.dice.enabled = false;
  o.fwbi_activation = act;
  return o;
}

TEST(Predict, ZeroScoreIsOneHalf) {
  const auto schema = parse_schema("hierarchies: h\na, 2, one-hot, h, dict\n");
  Model<double> model(schema, Plain(2));
  EXPECT_EQ(model.predict(make_instance(0, {{1}}).view()), 0.5);
}

TEST(Predict, SaturatesWithinClamp) {
  const auto schema = parse_schema("hierarchies: h\na, 2, one-hot, h, dict\n");
  Model<double> model(schema, Plain(1));
  model.fwbi().set_identity_projection();
  model.head().w = {1, 0};
  model.fwbi().w0 = 20;
  const double p = model.predict(make_instance(0, {{0}}).view());
  EXPECT_EQ(p, 1 - kProbabilityClamp);
  model.fwbi().w0 = -40;
  EXPECT_EQ(model.predict(make_instance(0, {{0}}).view()), kProbabilityClamp);
}

// Two feature fields in one hierarchical field, K_e = 1, no MLP:
// h_S = 0.1 + 0.2 - 0.4 = -0.1, e = 2 and 3, h_FM = 0.5 ((2+3)^2 - 4 - 9) = 6.
TEST(Predict, HandComputedFmScore) {
  const auto schema =
      parse_schema("hierarchies: h\na, 2, one-hot, h, dict\nb, 2, one-hot, h, dict\n");
  const auto inst = make_instance(1, {{0}, {1}});
  for (const auto act : {Activation::kIdentity, Activation::kRelu}) {
    Model<double> model(schema, Plain(1, act));
    model.embedding().column(0, 0)[0] = 2;
    model.embedding().column(1, 1)[0] = 3;
    model.fwbi().w0 = 0.1;
    model.fwbi().linear[0][0] = 0.2;
    model.fwbi().linear[1][1] = -0.4;
    model.fwbi().r(0, 0) = 0.5;
    model.fwbi().set_identity_projection();
    model.head().w = {1, 0.5};
    const double z = act == Activation::kIdentity ? -0.1 + 3.0 : 3.0;
    EXPECT_NEAR(model.predict(inst.view()), 1 / (1 + std::exp(-z)), 1e-15);
  }
}

TEST(Predict, HeadReluReading) {
  const auto schema = parse_schema("hierarchies: h\na, 2, one-hot, h, dict\n");
  auto opts = Plain(1);
  opts.head_activation = Activation::kRelu;
  Model<double> model(schema, opts);
  model.fwbi().set_identity_projection();
  model.head().w = {1, 0};
  model.fwbi().w0 = -3;
  EXPECT_EQ(model.predict(make_instance(0, {{0}}).view()), 0.5);
}

TEST(Predict, InferenceIsRepeatable) {
  std::mt19937_64 rng(3);
  const auto schema = testing::random_schema(rng, 6, 3);
  ModelOptions opts;
  opts.embed_dim = 8;
  opts.mlp = {8, 4};
  Model<double> model(schema, opts);
  model.initialize(7);
  const auto inst = testing::random_instance(schema, rng);
  const double first = model.predict(inst.view());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(model.predict(inst.view()), first);
}

TEST(Backward, ZeroScoreGradientGivesZeroGradients) {
  std::mt19937_64 rng(4);
  const auto schema = testing::random_schema(rng, 5, 2);
  ModelOptions opts;
  opts.embed_dim = 4;
  opts.mlp = {6, 3};
  Model<double> model(schema, opts);
  model.initialize(1);
  const auto inst = testing::random_instance(schema, rng);
  ForwardTrace<double> trace;
  const auto gate = model.inference_gate();
  model.forward(inst.view(), gate, trace);
  auto grads = model.make_gradients();
  model.backward_from_score(inst.view(), trace, gate, 0.0, grads);
  testing::for_each_trainable(model, grads, [](const std::string& name, double&, double g) {
    EXPECT_EQ(g, 0.0) << name;
  });
}

TEST(Backward, HeadGradientIsProbabilityMinusLabel) {
  const auto schema = parse_schema("hierarchies: h\na, 2, one-hot, h, dict\n");
  Model<double> model(schema, Plain(1));
  model.fwbi().set_identity_projection();
  model.head().w = {1, 0};
  model.fwbi().w0 = 0.3;
  const auto inst = make_instance(1, {{0}});
  ForwardTrace<double> trace;
  const auto gate = model.inference_gate();
  model.forward(inst.view(), gate, trace);
  auto grads = model.make_gradients();
  model.backward(inst.view(), trace, gate, grads);
  EXPECT_NEAR(grads.head[0], (trace.p - 1.0) * 0.3, 1e-15);
  EXPECT_NEAR(grads.fwbi.w0, trace.p - 1.0, 1e-15);
}

TEST(Backward, FixedSmallModelPassesFiniteDifferences) {
  std::mt19937_64 rng(10);
  const auto schema = testing::random_schema(rng, 6, 2);
  ModelOptions opts;
  opts.embed_dim = 4;
  opts.mlp = {5, 3};
  Model<double> model(schema, opts);
  model.initialize(1);
  testing::randomize(model, rng);
  const auto inst = testing::random_instance(schema, rng);
  const auto mask = sample_mask(0.7, 4, rng);
  const auto r = testing::check_gradients(model, inst.view(), DiceGate::train(mask));
  EXPECT_EQ(r.failures, 0u) << r.worst_name << " " << r.worst_relative;
  EXPECT_GT(r.checked, 100u);
}

class GradientSweep : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(GradientSweep, EveryTrainableScalar) {
  std::mt19937_64 rng(GetParam());
  const std::size_t m = 1 + rng() % 3;
  const auto schema = testing::random_schema(rng, m + rng() % (9 - m), m);
  ModelOptions opts;
  opts.embed_dim = 1 + rng() % 8;
  opts.mlp.clear();
  for (std::size_t l = rng() % 3; l > 0; --l) opts.mlp.push_back(2 + rng() % 5);
  opts.head_activation = rng() % 4 == 0 ? Activation::kRelu : Activation::kIdentity;
  Model<double> model(schema, opts);
  model.initialize(GetParam());
  testing::randomize(model, rng);
  const auto inst = testing::random_instance(schema, rng);
  const auto gate = rng() % 2 ? DiceGate::train(sample_mask(0.7, opts.embed_dim, rng))
                              : model.inference_gate();
  const auto r = testing::check_gradients(model, inst.view(), gate);
  EXPECT_EQ(r.failures, 0u) << r.worst_name << " " << r.worst_relative;
  EXPECT_LE(r.kink_skipped * 20, r.checked + r.kink_skipped);
}

INSTANTIATE_TEST_SUITE_P(Seeds, GradientSweep, ::testing::Range<std::uint64_t>(100, 130));

TEST(Backward, PinnedVariantsPassFiniteDifferences) {
  std::mt19937_64 rng(12);
  const auto schema = testing::random_schema(rng, 5, 2);
  for (const auto v : {Variant::kFm, Variant::kFwfm, Variant::kLinear}) {
    Model<double> model(make_config(v, schema, WithDim(3)));
    model.initialize(2);
    testing::randomize(model, rng);
    const auto inst = testing::random_instance(model.schema(), rng);
    const auto r = testing::check_gradients(model, inst.view(), model.inference_gate());
    EXPECT_EQ(r.failures, 0u) << to_string(v) << " " << r.worst_name;
  }
}

TEST(Adagrad, Examples) {
  double theta = 0, accum = 0;
  EXPECT_NEAR(adagrad_update(theta, accum, 2.0, 0.1, 1e-8), -0.1, 1e-9);
  EXPECT_EQ(accum, 4.0);
  EXPECT_NEAR(adagrad_update(theta, accum, 2.0, 0.1, 1e-8), -0.1 * 2 / std::sqrt(8.0), 1e-9);
  EXPECT_NEAR(-0.1 * 2 / std::sqrt(8.0), -0.0707, 1e-4);
  EXPECT_EQ(accum, 8.0);
  const double before = theta;
  EXPECT_EQ(adagrad_update(theta, accum, 0.0, 0.1, 1e-8), 0.0);
  EXPECT_EQ(accum, 8.0);
  EXPECT_EQ(theta, before);
}

TEST(Adagrad, StepTouchesOnlyActiveRowsAndSkipsPins) {
  std::mt19937_64 rng(5);
  const auto schema = testing::random_schema(rng, 4, 1, false);
  Model<double> model(make_fm_config(schema, WithDim(3)));
  model.initialize(1);
  const auto before = model;
  auto state = TrainState<double>::for_model(model, 1);
  const auto inst = testing::random_instance(model.schema(), rng);
  ForwardTrace<double> trace;
  const auto gate = model.inference_gate();
  model.forward(inst.view(), gate, trace);
  auto grads = model.make_gradients();
  model.backward(inst.view(), trace, gate, grads);
  adagrad_step(model, state, grads, 0.1, 1e-8);
  EXPECT_EQ(state.step, 1u);
  EXPECT_EQ(model.fwbi().r, before.fwbi().r);
  EXPECT_EQ(model.fwbi().projection, before.fwbi().projection);
  EXPECT_EQ(model.head(), before.head());
  for (std::size_t n = 0; n < schema.field_count(); ++n) {
    const auto active = inst.field(n)[0];
    for (std::uint32_t j = 0; j < model.embedding().cardinality(n); ++j) {
      const auto a = model.embedding().column(n, j);
      const auto b = before.embedding().column(n, j);
      const bool same = std::equal(a.begin(), a.end(), b.begin());
      if (j != active) {
        EXPECT_TRUE(same);
        EXPECT_EQ(model.fwbi().linear[n][j], before.fwbi().linear[n][j]);
      }
    }
    EXPECT_NE(model.fwbi().linear[n][active], before.fwbi().linear[n][active]);
  }
  for (const auto& acc : state.embedding) {
    for (const double g : acc) EXPECT_GE(g, 0.0);
  }
}

}  // namespace
}  // namespace fieldctr

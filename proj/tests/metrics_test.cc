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
#include "fieldctr/metrics.h"
#include "oracles.h"
#include "test_util.h"

namespace fieldctr {
namespace {

using Scores = std::vector<double>;
using Labels = std::vector<float>;

TEST(Auc, Examples) {
  EXPECT_EQ(auc(Scores{0.9, 0.1}, Labels{1, 0}), 1.0);
  EXPECT_EQ(auc(Scores{0.1, 0.9}, Labels{1, 0}), 0.0);
  EXPECT_EQ(auc(Scores{0.8, 0.6, 0.4}, Labels{1, 0, 1}), 0.5);
  EXPECT_EQ(auc(Scores{0.5, 0.5, 0.5, 0.5}, Labels{1, 0, 1, 0}), 0.5);
}

TEST(Auc, Errors) {
  EXPECT_THROW(auc(Scores{0.1, 0.2}, Labels{1}), LengthMismatch);
  EXPECT_THROW(auc(Scores{0.1, 0.2}, Labels{1, 1}), UndefinedMetric);
  EXPECT_THROW(auc(Scores{}, Labels{}), UndefinedMetric);
  EXPECT_THROW(auc(Scores{0.1, 0.2}, Labels{1, 0.5f}), DomainError);
}

TEST(Auc, EqualsPairCountingExactly) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 499;
    const bool ties = trial % 2 == 0;
    Scores s(n);
    Labels y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = ties ? static_cast<double>(rng() % 5) / 4 : testing::uniform(rng, 0, 1);
      y[i] = static_cast<float>(rng() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_EQ(auc(s, y), oracle::pair_count_auc(s, y)) << "n=" << n;
  }
}

TEST(Auc, InvariantUnderStrictlyMonotoneMaps) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 50 + rng() % 200;
    Scores s(n);
    Labels y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 40) / 40;
      y[i] = static_cast<float>(rng() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    const double a = testing::uniform(rng, 0.5, 3);
    const double b = testing::uniform(rng, -2, 2);
    Scores mapped(n);
    for (std::size_t i = 0; i < n; ++i) {
      switch (trial % 3) {
        case 0: mapped[i] = a * s[i] + b; break;
        case 1: mapped[i] = std::exp(a * s[i]); break;
        default: mapped[i] = std::pow(s[i] + 1, 3) - b; break;
      }
    }
    EXPECT_EQ(auc(s, y), auc(mapped, y));
  }
}

Dataset Balanced(std::size_t rows) {
  Dataset d(1);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto v = static_cast<std::uint32_t>(r % 2);
    d.add(make_instance(static_cast<float>(v), {{v}}).view());
  }
  return d;
}

ModelOptions Tiny() {
  ModelOptions o;
  o.embed_dim = 2;
  o.mlp.clear();
  return o;
}

TEST(Evaluate, ConstantModelOnBalancedData) {
  const auto schema = parse_schema("hierarchies: h\na, 2, one-hot, h, dict\n");
  Model<double> model(schema, Tiny());
  const auto report = evaluate(model, Balanced(100));
  ASSERT_TRUE(report.auc.has_value());
  EXPECT_EQ(*report.auc, 0.5);
  EXPECT_NEAR(report.mean_logloss, 0.693147, 1e-6);
  EXPECT_EQ(report.n_examples, 100u);
  EXPECT_GE(report.wall_seconds, 0.0);
}

TEST(Evaluate, SeparatingModel) {
  const auto schema = parse_schema("hierarchies: h\na, 2, one-hot, h, dict\n");
  auto opts = Tiny();
  opts.fwbi_activation = Activation::kIdentity;
  Model<double> model(schema, opts);
  model.fwbi().set_identity_projection();
  model.head().w = {1, 0, 0};
  model.fwbi().linear[0] = {-3, 3};
  const auto report = evaluate(model, Balanced(10));
  EXPECT_EQ(*report.auc, 1.0);
  EXPECT_NEAR(report.mean_logloss, std::log1p(std::exp(-3.0)), 1e-12);
}

TEST(Evaluate, SingleClassAndEmpty) {
  const auto schema = parse_schema("hierarchies: h\na, 2, one-hot, h, dict\n");
  Model<double> model(schema, Tiny());
  Dataset ones(1);
  for (int i = 0; i < 4; ++i) ones.add(make_instance(1, {{0}}).view());
  EXPECT_FALSE(evaluate(model, ones).auc.has_value());
  EXPECT_THROW(auc(predict_all(model, ones), ones.labels()), UndefinedMetric);
  EXPECT_THROW(evaluate(model, Dataset(1)), EmptyData);
}

TEST(ParamCount, HandEnumeratedSmallModel) {
  const auto schema = parse_schema("hierarchies: h\na, 1, one-hot, h, dict\n");
  ModelOptions o;
  o.embed_dim = 1;
  o.mlp.clear();
  const auto c = param_count(schema, o);
  EXPECT_EQ(c.embedding, 1u);     // N K_e
  EXPECT_EQ(c.linear, 2u);        // w_0 and one weight
  EXPECT_EQ(c.pair_weights, 1u);  // r[0][0]
  EXPECT_EQ(c.projection, 4u);    // (K_e+1)^2
  EXPECT_EQ(c.mlp, 0u);
  EXPECT_EQ(c.head, 2u);          // K_e+1
  EXPECT_EQ(c.total(), 10u);
  EXPECT_EQ(c.complexity, "O(NK_e + M^2 + MK_eH)");
}

TEST(ParamCount, MatchesLiveModel) {
  std::mt19937_64 rng(4);
  const auto schema = testing::random_schema(rng, 7, 3);
  for (const auto v : {Variant::kFlen, Variant::kFm, Variant::kFwfm, Variant::kLinear}) {
    ModelOptions base;
    base.embed_dim = 5;
    base.mlp = {6, 4};
    const auto spec = make_config(v, schema, base);
    Model<double> model(spec);
    auto grads = model.make_gradients();
    std::uint64_t live = 0;
    testing::for_each_trainable(model, grads, [&](const std::string&, double&, double) { ++live; });
    EXPECT_EQ(param_count(spec.schema, spec.options).total(), live) << to_string(v);
  }
}

TEST(ParamCount, EmbeddingBlockLinearInDim) {
  std::mt19937_64 rng(2);
  const auto schema = testing::random_schema(rng, 6, 2);
  ModelOptions o;
  o.embed_dim = 8;
  const auto a = param_count(schema, o);
  o.embed_dim = 16;
  const auto b = param_count(schema, o);
  EXPECT_EQ(b.embedding, 2 * a.embedding);
}

TEST(ParamCount, ComplexityLabels) {
  std::mt19937_64 rng(2);
  const auto schema = testing::random_schema(rng, 3, 1);
  EXPECT_EQ(param_count(schema, make_fm_config(schema).options).complexity, "O(NK_e)");
  EXPECT_EQ(param_count(schema, make_fwfm_config(schema).options).complexity, "O(NK_e + M^2)");
  EXPECT_EQ(param_count(schema, make_linear_config(schema).options).complexity, "O(N)");
}

Dataset RandomData(const FieldSchema& schema, std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Dataset d(schema.field_count());
  for (std::size_t r = 0; r < rows; ++r) d.add(testing::random_instance(schema, rng).view());
  return d;
}

FieldSchema Wide(std::size_t features, std::size_t hierarchies) {
  FieldSchema s;
  for (std::size_t m = 0; m < hierarchies; ++m) s.hierarchies.push_back("h" + std::to_string(m));
  for (std::size_t n = 0; n < features; ++n) {
    s.fields.push_back({"f" + std::to_string(n), 50, Encoding::kOneHot, n % hierarchies});
  }
  s.validate();
  return s;
}

TEST(Benchmark, RejectsNonPositiveBudget) {
  const auto schema = Wide(1, 1);
  Model<float> model(schema, {});
  const auto data = RandomData(schema, 10, 1);
  EXPECT_THROW(benchmark_throughput(model, data, 0.0), Error);
  EXPECT_THROW(benchmark_throughput(model, data, -1.0), Error);
}

TEST(Benchmark, OneFieldModelIsMuchFasterThanHundredFields) {
  const auto narrow = Wide(1, 1);
  const auto wide = Wide(100, 100);
  Model<float> a(narrow, {});
  Model<float> b(wide, {});
  a.initialize(1);
  b.initialize(1);
  const auto ta = benchmark_throughput(a, RandomData(narrow, 2000, 1), 1.0);
  const auto tb = benchmark_throughput(b, RandomData(wide, 2000, 1), 1.0);
  EXPECT_GE(ta.inference_per_second, 10 * tb.inference_per_second);
  EXPECT_GE(ta.train_per_second, 10 * tb.train_per_second);
}

TEST(Benchmark, NonincreasingInHierarchicalFields) {
  double prev_inf = INFINITY;
  double prev_train = INFINITY;
  for (const std::size_t m : {1, 8, 32}) {
    const auto schema = Wide(32, m);
    Model<float> model(schema, {});
    model.initialize(1);
    const auto t = benchmark_throughput(model, RandomData(schema, 2000, 2), 1.0);
    EXPECT_LE(t.inference_per_second, prev_inf) << "M=" << m;
    EXPECT_LE(t.train_per_second, prev_train) << "M=" << m;
    prev_inf = t.inference_per_second;
    prev_train = t.train_per_second;
  }
}

}  // namespace
}  // namespace fieldctr

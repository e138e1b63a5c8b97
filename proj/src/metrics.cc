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

#include "fieldctr/metrics.h"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "fieldctr/errors.h"
#include "fieldctr/train.h"

namespace fieldctr {

double auc(std::span<const double> scores, std::span<const float> labels) {
  if (scores.size() != labels.size()) throw LengthMismatch("scores and labels differ in length");
  std::uint64_t positives = 0;
  for (const float y : labels) {
    if (y != 0.0f && y != 1.0f) throw DomainError("labels must be 0 or 1");
    positives += y == 1.0f;
  }
  const std::uint64_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw UndefinedMetric("AUC needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the Mann-Whitney U, kept integral so the result is exact.
  std::uint64_t twice_u = 0;
  std::uint64_t neg_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1.0f ? pos : neg) += 1;
      ++j;
    }
    twice_u += 2 * pos * neg_below + pos * neg;
    neg_below += neg;
    i = j;
  }
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

template <typename T>
std::vector<double> predict_all(const Model<T>& model, const Dataset& data) {
  std::vector<double> out(data.size());
  const auto gate = model.inference_gate();
  ForwardTrace<T> trace;
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = model.forward(data[i], gate, trace);
  return out;
}

template <typename T>
EvalReport evaluate(const Model<T>& model, const Dataset& data) {
  if (data.empty()) throw EmptyData("evaluation data is empty");
  const auto start = std::chrono::steady_clock::now();
  const auto scores = predict_all(model, data);
  EvalReport report;
  report.n_examples = data.size();
  double total = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) total += logloss(data[i].label, scores[i]);
  report.mean_logloss = total / static_cast<double>(scores.size());
  try {
    report.auc = auc(scores, data.labels());
  } catch (const UndefinedMetric&) {
    report.auc.reset();
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ParamCount param_count(const FieldSchema& schema, const ModelOptions& options) {
  const auto cards = schema.cardinalities();
  const std::uint64_t features = std::accumulate(cards.begin(), cards.end(), std::uint64_t{0});
  const std::uint64_t dim = options.embed_dim;
  const std::uint64_t fields = schema.hierarchy_count();

  ParamCount c;
  c.embedding = features * dim;
  c.linear = features + 1;
  if (!options.fixed_diagonal) c.pair_weights += fields;
  if (!options.fixed_off_diagonal) c.pair_weights += fields * (fields - 1) / 2;
  if (!options.identity_projection) c.projection = (dim + 1) * (dim + 1);
  std::uint64_t in = fields * dim;
  for (const auto w : options.mlp) {
    c.mlp += in * w + w;
    in = w;
  }
  if (!options.sum_head) c.head = (dim + 1) + (options.mlp.empty() ? 0 : options.mlp.back());

  switch (options.variant) {
    case Variant::kFlen: c.complexity = "O(NK_e + M^2 + MK_eH)"; break;
    case Variant::kFm: c.complexity = "O(NK_e)"; break;
    case Variant::kFwfm: c.complexity = "O(NK_e + M^2)"; break;
    case Variant::kLinear: c.complexity = "O(N)"; break;
  }
  return c;
}

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

template <typename T>
Throughput benchmark_throughput(const Model<T>& model, const Dataset& data, double seconds,
                                std::size_t batch_size, std::size_t trials) {
  if (!(seconds > 0)) throw Error("benchmark budget must be positive");
  if (data.empty()) throw EmptyData("benchmark data is empty");
  if (trials == 0 || batch_size == 0) throw Error("trials and batch size must be positive");
  const auto budget = std::chrono::duration<double>(seconds / static_cast<double>(2 * trials));

  Throughput result;
  {
    const auto gate = model.inference_gate();
    ForwardTrace<T> trace;
    for (std::size_t i = 0; i < std::min<std::size_t>(data.size(), 64); ++i) {
      model.forward(data[i], gate, trace);
    }
    std::vector<double> rates;
    std::size_t row = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      std::size_t done = 0;
      const auto start = Clock::now();
      auto elapsed = Clock::duration::zero();
      do {
        for (int k = 0; k < 16; ++k) {
          model.forward(data[row], gate, trace);
          row = (row + 1) % data.size();
          ++done;
        }
        elapsed = Clock::now() - start;
      } while (elapsed < budget);
      rates.push_back(static_cast<double>(done) / std::chrono::duration<double>(elapsed).count());
    }
    result.inference_per_second = median(std::move(rates));
  }
  {
    Model<T> copy = model;
    Trainer<T> trainer(copy, TrainOptions{.batch_size = batch_size});
    auto mask_rng = derive_rng(0, 0, 1);
    std::vector<std::size_t> rows;
    std::size_t next = 0;
    const auto fill_batch = [&] {
      rows.clear();
      for (std::size_t k = 0; k < std::min(batch_size, data.size()); ++k) {
        rows.push_back(next);
        next = (next + 1) % data.size();
      }
    };
    fill_batch();
    trainer.train_batch(data, rows, mask_rng);
    std::vector<double> rates;
    for (std::size_t t = 0; t < trials; ++t) {
      std::size_t done = 0;
      const auto start = Clock::now();
      auto elapsed = Clock::duration::zero();
      do {
        fill_batch();
        trainer.train_batch(data, rows, mask_rng);
        done += rows.size();
        elapsed = Clock::now() - start;
      } while (elapsed < budget);
      rates.push_back(static_cast<double>(done) / std::chrono::duration<double>(elapsed).count());
    }
    result.train_per_second = median(std::move(rates));
  }
  return result;
}

#define FIELDCTR_INSTANTIATE(T)                                                                \
  template std::vector<double> predict_all<T>(const Model<T>&, const Dataset&);                \
  template EvalReport evaluate<T>(const Model<T>&, const Dataset&);                            \
  template Throughput benchmark_throughput<T>(const Model<T>&, const Dataset&, double,         \
                                              std::size_t, std::size_t);

FIELDCTR_INSTANTIATE(float)
FIELDCTR_INSTANTIATE(double)
#undef FIELDCTR_INSTANTIATE

}  // namespace fieldctr

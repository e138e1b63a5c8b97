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

#ifndef FIELDCTR_METRICS_H_
#define FIELDCTR_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fieldctr/config.h"
#include "fieldctr/network.h"
#include "fieldctr/schema.h"

namespace fieldctr {

// Probability that a random positive outscores a random negative, ties
// counting 1/2. O(n log n). Throws UndefinedMetric when only one class is
// present, LengthMismatch / DomainError on malformed input.
double auc(std::span<const double> scores, std::span<const float> labels);

struct EvalReport {
  std::optional<double> auc;  // empty when the labels are single-class
  double mean_logloss = 0;
  std::size_t n_examples = 0;
  double wall_seconds = 0;
};

// Inference-mode probabilities, in row order.
template <typename T>
std::vector<double> predict_all(const Model<T>& model, const Dataset& data);

// Single streaming pass in inference mode. Throws EmptyData.
template <typename T>
EvalReport evaluate(const Model<T>& model, const Dataset& data);

// Trainable scalar counts per parameter block. Pinned blocks count zero.
struct ParamCount {
  std::uint64_t embedding = 0;
  std::uint64_t linear = 0;  // per-value weights plus the bias
  std::uint64_t pair_weights = 0;
  std::uint64_t projection = 0;
  std::uint64_t mlp = 0;
  std::uint64_t head = 0;
  std::string complexity;

  std::uint64_t total() const {
    return embedding + linear + pair_weights + projection + mlp + head;
  }
};

// `schema` must be resolved.
ParamCount param_count(const FieldSchema& schema, const ModelOptions& options);

struct Throughput {
  double train_per_second = 0;
  double inference_per_second = 0;
};

// Median instances/second over `trials` timed runs per mode, the budget split
// evenly across all runs. Training runs on a private copy of the model.
template <typename T>
Throughput benchmark_throughput(const Model<T>& model, const Dataset& data, double seconds,
                                std::size_t batch_size = 512, std::size_t trials = 5);

}  // namespace fieldctr

#endif  // FIELDCTR_METRICS_H_

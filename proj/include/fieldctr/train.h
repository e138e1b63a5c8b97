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

#ifndef FIELDCTR_TRAIN_H_
#define FIELDCTR_TRAIN_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "fieldctr/network.h"
#include "fieldctr/schema.h"

namespace fieldctr {

struct TrainOptions {
  double learning_rate = 0.01;
  double epsilon = 1e-8;
  std::size_t batch_size = 512;
  std::uint64_t seed = 1;
};

// AdaGrad squared-gradient sums shaped like the model, plus the counters
// that make training resumable and deterministic.
template <typename T>
struct TrainState {
  std::uint64_t step = 0;
  std::uint64_t epoch = 0;
  std::uint64_t seed = 0;

  T w0 = T(0);
  std::vector<std::vector<T>> linear;
  std::vector<T> r;
  std::vector<T> projection;
  std::vector<DenseLayer<T>> mlp;
  std::vector<T> head;
  std::vector<std::vector<T>> embedding;

  static TrainState for_model(const Model<T>& model, std::uint64_t seed);

  bool operator==(const TrainState&) const = default;
};

// G += g^2, then theta -= lr * g / sqrt(G + eps). Returns the applied delta.
template <typename T>
T adagrad_update(T& param, T& accum, T grad, double lr, double eps) {
  accum += grad * grad;
  const T delta = -static_cast<T>(lr) * grad / std::sqrt(accum + static_cast<T>(eps));
  param += delta;
  return delta;
}

// One optimizer step over every unpinned parameter; sparse groups touch only
// the rows present in `grads`.
template <typename T>
void adagrad_step(Model<T>& model, TrainState<T>& state, const Gradients<T>& grads, double lr,
                  double eps);

// Independent stream for (seed, epoch, purpose).
std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t epoch, std::uint64_t purpose);

// Fisher-Yates over [0, n) driven by `rng`.
std::vector<std::size_t> shuffled_order(std::size_t n, std::mt19937_64& rng);

struct EpochSummary {
  std::uint64_t epoch = 0;
  std::size_t examples = 0;
  std::size_t steps = 0;
  double mean_logloss = 0;
};

template <typename T>
class Trainer {
 public:
  using StepCallback = std::function<void(std::uint64_t step, double running_logloss)>;

  Trainer(Model<T>& model, TrainOptions options);
  Trainer(Model<T>& model, TrainOptions options, TrainState<T> state);

  // Forward/backward over `rows` of `data` with one gate, then one AdaGrad
  // step. Returns the summed train-mode log loss of the batch.
  double train_batch(const Dataset& data, std::span<const std::size_t> rows,
                     std::mt19937_64& mask_rng);

  // One shuffled pass. Deterministic given the seed and epoch counter.
  // `on_step` (optional) runs after every optimizer step.
  EpochSummary train_epoch(const Dataset& data, const StepCallback& on_step = {});

  const TrainState<T>& state() const { return state_; }
  TrainState<T>& state() { return state_; }
  const TrainOptions& options() const { return options_; }

 private:
  Model<T>& model_;
  TrainOptions options_;
  TrainState<T> state_;
  Gradients<T> grads_;
  ForwardTrace<T> trace_;
};

}  // namespace fieldctr

#endif  // FIELDCTR_TRAIN_H_

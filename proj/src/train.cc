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

#include "fieldctr/train.h"

#include "fieldctr/errors.h"

namespace fieldctr {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <typename T>
void step_dense(std::vector<T>& params, std::vector<T>& accum, const std::vector<T>& grads,
                double lr, double eps) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i] != T(0)) adagrad_update(params[i], accum[i], grads[i], lr, eps);
  }
}

}  // namespace

std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t epoch, std::uint64_t purpose) {
  return std::mt19937_64(mix(mix(mix(seed) ^ epoch) ^ (purpose * 0xd1b54a32d192ed03ULL)));
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

template <typename T>
TrainState<T> TrainState<T>::for_model(const Model<T>& model, std::uint64_t seed) {
  TrainState s;
  s.seed = seed;
  for (const auto& w : model.fwbi().linear) s.linear.emplace_back(w.size(), T(0));
  s.r.assign(model.fwbi().r.data().size(), T(0));
  s.projection.assign(model.fwbi().projection.size(), T(0));
  for (const auto& layer : model.mlp().layers) s.mlp.emplace_back(layer.in, layer.out);
  s.head.assign(model.head().w.size(), T(0));
  for (std::size_t n = 0; n < model.embedding().field_count(); ++n) {
    s.embedding.emplace_back(model.embedding().matrix(n).size(), T(0));
  }
  return s;
}

template <typename T>
void adagrad_step(Model<T>& model, TrainState<T>& state, const Gradients<T>& grads, double lr,
                  double eps) {
  if (!(lr > 0) || !(eps > 0)) throw Error("learning rate and epsilon must be positive");
  auto& fwbi = model.fwbi();
  if (grads.fwbi.w0 != T(0)) adagrad_update(fwbi.w0, state.w0, grads.fwbi.w0, lr, eps);

  for (std::size_t n = 0; n < fwbi.linear.size(); ++n) {
    const auto& g = grads.fwbi.linear[n];
    for (std::size_t s = 0; s < g.touched().size(); ++s) {
      const auto idx = g.touched()[s];
      adagrad_update(fwbi.linear[n][idx], state.linear[n][idx], g.row_at(s)[0], lr, eps);
    }
  }

  const std::size_t fields = fwbi.r.fields();
  for (std::size_t i = 0; i < fields; ++i) {
    for (std::size_t j = i; j < fields; ++j) {
      if (model.r_pinned(i, j)) continue;
      const std::size_t k = fwbi.r.index(i, j);
      if (grads.fwbi.r[k] != T(0)) {
        adagrad_update(fwbi.r.data()[k], state.r[k], grads.fwbi.r[k], lr, eps);
      }
    }
  }
  if (!model.projection_pinned()) {
    step_dense(fwbi.projection, state.projection, grads.fwbi.projection, lr, eps);
  }
  auto& layers = model.mlp().layers;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    step_dense(layers[l].weight, state.mlp[l].weight, grads.mlp[l].weight, lr, eps);
    step_dense(layers[l].bias, state.mlp[l].bias, grads.mlp[l].bias, lr, eps);
  }
  if (!model.head_pinned()) step_dense(model.head().w, state.head, grads.head, lr, eps);

  auto& table = model.embedding();
  const std::size_t dim = table.dim();
  for (std::size_t n = 0; n < grads.embedding.size(); ++n) {
    const auto& g = grads.embedding[n];
    auto& accum = state.embedding[n];
    for (std::size_t s = 0; s < g.touched().size(); ++s) {
      const auto idx = g.touched()[s];
      auto col = table.column(n, idx);
      const auto row = g.row_at(s);
      T* acc = accum.data() + static_cast<std::size_t>(idx) * dim;
      for (std::size_t k = 0; k < dim; ++k) {
        if (row[k] != T(0)) adagrad_update(col[k], acc[k], row[k], lr, eps);
      }
    }
  }
  ++state.step;
}

template <typename T>
Trainer<T>::Trainer(Model<T>& model, TrainOptions options)
    : Trainer(model, options, TrainState<T>::for_model(model, options.seed)) {}

template <typename T>
Trainer<T>::Trainer(Model<T>& model, TrainOptions options, TrainState<T> state)
    : model_(model),
      options_(options),
      state_(std::move(state)),
      grads_(model.make_gradients()) {
  if (options_.batch_size == 0) throw Error("batch size must be positive");
  if (!(options_.learning_rate > 0) || !(options_.epsilon > 0)) {
    throw Error("learning rate and epsilon must be positive");
  }
}

template <typename T>
double Trainer<T>::train_batch(const Dataset& data, std::span<const std::size_t> rows,
                               std::mt19937_64& mask_rng) {
  const auto& dice = model_.options().dice;
  const std::size_t dim = model_.dim();
  grads_.clear();
  const T weight = T(1) / static_cast<T>(rows.size());
  double loss = 0;
  DiceGate gate = DiceGate::off(dim);
  if (dice.enabled && !dice.per_example) gate = DiceGate::train(sample_mask(dice.beta, dim, mask_rng));
  for (const auto row : rows) {
    if (dice.enabled && dice.per_example) {
      gate = DiceGate::train(sample_mask(dice.beta, dim, mask_rng));
    }
    const auto inst = data[row];
    const double p = model_.forward(inst, gate, trace_);
    loss += logloss(inst.label, p);
    model_.backward(inst, trace_, gate, grads_, weight);
  }
  adagrad_step(model_, state_, grads_, options_.learning_rate, options_.epsilon);
  return loss;
}

template <typename T>
EpochSummary Trainer<T>::train_epoch(const Dataset& data, const StepCallback& on_step) {
  if (data.empty()) throw EmptyData("training data is empty");
  auto shuffle_rng = derive_rng(state_.seed, state_.epoch, 0);
  auto mask_rng = derive_rng(state_.seed, state_.epoch, 1);
  const auto order = shuffled_order(data.size(), shuffle_rng);

  EpochSummary summary;
  summary.epoch = state_.epoch + 1;
  double total = 0;
  for (std::size_t start = 0; start < order.size(); start += options_.batch_size) {
    const std::size_t end = std::min(order.size(), start + options_.batch_size);
    total += train_batch(data, std::span<const std::size_t>(order).subspan(start, end - start),
                         mask_rng);
    summary.examples = end;
    ++summary.steps;
    if (on_step) on_step(state_.step, total / static_cast<double>(end));
  }
  summary.mean_logloss = total / static_cast<double>(summary.examples);
  ++state_.epoch;
  return summary;
}

#define FIELDCTR_INSTANTIATE(T)                                                                \
  template struct TrainState<T>;                                                               \
  template class Trainer<T>;                                                                   \
  template void adagrad_step<T>(Model<T>&, TrainState<T>&, const Gradients<T>&, double, double);

FIELDCTR_INSTANTIATE(float)
FIELDCTR_INSTANTIATE(double)
#undef FIELDCTR_INSTANTIATE

}  // namespace fieldctr

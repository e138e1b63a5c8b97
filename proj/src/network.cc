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

#include "fieldctr/network.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fieldctr/errors.h"

namespace fieldctr {

namespace {

template <typename T>
void fill_uniform(std::vector<T>& v, double bound, std::mt19937_64& rng) {
  for (auto& x : v) x = static_cast<T>((2.0 * unit_uniform(rng) - 1.0) * bound);
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logloss(double y, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("probability must lie in (0, 1), got " + std::to_string(p));
  return -(y * std::log(p) + (1.0 - y) * std::log1p(-p));
}

template <typename T>
MlpParams<T>::MlpParams(std::size_t input, std::span<const std::size_t> widths)
    : input_width(input) {
  std::size_t in = input;
  for (const auto w : widths) {
    if (w == 0) throw ShapeMismatch("MLP layer width must be positive");
    layers.emplace_back(in, w);
    in = w;
  }
}

template <typename T>
void mlp_forward(const MlpParams<T>& params, std::span<const T> h0, MlpTrace<T>& trace) {
  if (h0.size() != params.input_width) {
    throw ShapeMismatch("MLP input has " + std::to_string(h0.size()) + " entries, expected " +
                        std::to_string(params.input_width));
  }
  trace.h.resize(params.layers.size() + 1);
  trace.h[0].assign(h0.begin(), h0.end());
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    const auto& x = trace.h[l];
    if (x.size() != layer.in) throw ShapeMismatch("MLP layer widths are incompatible");
    auto& y = trace.h[l + 1];
    y.resize(layer.out);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const T* w = layer.weight.data() + o * layer.in;
      T acc = layer.bias[o];
      for (std::size_t i = 0; i < layer.in; ++i) acc += w[i] * x[i];
      y[o] = acc > T(0) ? acc : T(0);
    }
  }
}

template <typename T>
void mlp_backward(const MlpParams<T>& params, const MlpTrace<T>& trace,
                  std::span<const T> upstream, std::vector<DenseLayer<T>>& grads,
                  std::span<T> input_grad) {
  std::vector<T> g(upstream.begin(), upstream.end());
  std::vector<T> g_prev;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const auto& layer = params.layers[l];
    auto& grad = grads[l];
    const auto& x = trace.h[l];
    const auto& y = trace.h[l + 1];
    g_prev.assign(layer.in, T(0));
    for (std::size_t o = 0; o < layer.out; ++o) {
      if (!(y[o] > T(0))) continue;
      const T go = g[o];
      if (go == T(0)) continue;
      grad.bias[o] += go;
      const T* w = layer.weight.data() + o * layer.in;
      T* gw = grad.weight.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) {
        gw[i] += go * x[i];
        g_prev[i] += w[i] * go;
      }
    }
    g.swap(g_prev);
  }
  std::copy(g.begin(), g.end(), input_grad.begin());
}

template <typename T>
void Gradients<T>::clear() {
  fwbi.clear();
  for (auto& layer : mlp) {
    std::fill(layer.weight.begin(), layer.weight.end(), T(0));
    std::fill(layer.bias.begin(), layer.bias.end(), T(0));
  }
  std::fill(head.begin(), head.end(), T(0));
  for (auto& e : embedding) e.clear();
}

template <typename T>
Model<T>::Model(FieldSchema schema, ModelOptions options)
    : schema_(std::move(schema)), options_(std::move(options)) {
  schema_.validate();
  const auto cards = schema_.cardinalities();
  const std::size_t dim = options_.embed_dim;
  if (dim == 0) throw ShapeMismatch("embedding dimension must be positive");
  check_beta(options_.dice.beta);
  embedding_ = EmbeddingTable<T>(cards, dim);
  fwbi_ = FwBIParams<T>(cards, schema_.hierarchy_count(), dim);
  mlp_ = MlpParams<T>(schema_.hierarchy_count() * dim, options_.mlp);
  head_.w.assign(fwbi_.width() + mlp_.output_width(), T(0));
  apply_pins();
}

template <typename T>
void Model<T>::apply_pins() {
  const std::size_t fields = schema_.hierarchy_count();
  for (std::size_t i = 0; i < fields; ++i) {
    for (std::size_t j = i; j < fields; ++j) {
      const auto& pin = i == j ? options_.fixed_diagonal : options_.fixed_off_diagonal;
      if (pin) fwbi_.r(i, j) = static_cast<T>(*pin);
    }
  }
  if (options_.identity_projection) fwbi_.set_identity_projection();
  if (options_.sum_head) std::fill(head_.w.begin(), head_.w.end(), T(1));
}

template <typename T>
void Model<T>::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t dim = options_.embed_dim;
  embedding_.initialize(rng);
  fwbi_.w0 = T(0);
  for (auto& w : fwbi_.linear) std::fill(w.begin(), w.end(), T(0));
  std::fill(fwbi_.r.data().begin(), fwbi_.r.data().end(), T(1));
  fill_uniform(fwbi_.projection, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
  for (auto& layer : mlp_.layers) {
    fill_uniform(layer.weight, std::sqrt(6.0 / static_cast<double>(layer.in)), rng);
    std::fill(layer.bias.begin(), layer.bias.end(), T(0));
  }
  fill_uniform(head_.w, 1.0 / std::sqrt(static_cast<double>(head_.w.size())), rng);
  apply_pins();
}

template <typename T>
DiceGate Model<T>::inference_gate() const {
  return options_.dice.enabled ? DiceGate::inference(options_.dice.beta, dim())
                               : DiceGate::off(dim());
}

template <typename T>
double Model<T>::forward(const InstanceView& inst, const DiceGate& gate,
                         ForwardTrace<T>& trace) const {
  embed_instance(embedding_, schema_, inst, trace.embedded);
  fwbi_forward(fwbi_, schema_, inst, trace.embedded, gate, options_.fwbi_activation, trace.fwbi);
  mlp_forward(mlp_, std::span<const T>(trace.embedded.field_vecs), trace.mlp);

  const auto deep = trace.mlp.output();
  trace.h_f.assign(trace.fwbi.out.begin(), trace.fwbi.out.end());
  trace.h_f.insert(trace.h_f.end(), deep.begin(), deep.end());
  T z = T(0);
  for (std::size_t i = 0; i < trace.h_f.size(); ++i) z += head_.w[i] * trace.h_f[i];
  trace.z_pre = z;
  trace.z = options_.head_activation == Activation::kRelu && z <= T(0) ? T(0) : z;
  trace.p = std::clamp(sigmoid(static_cast<double>(trace.z)), kProbabilityClamp,
                       1.0 - kProbabilityClamp);
  return trace.p;
}

template <typename T>
double Model<T>::predict(const InstanceView& inst) const {
  ForwardTrace<T> trace;
  return forward(inst, inference_gate(), trace);
}

template <typename T>
Gradients<T> Model<T>::make_gradients() const {
  Gradients<T> g;
  g.fwbi = make_fwbi_gradients(fwbi_);
  for (const auto& layer : mlp_.layers) g.mlp.emplace_back(layer.in, layer.out);
  g.head.assign(head_.w.size(), T(0));
  g.embedding.assign(schema_.field_count(), SparseRowGradient<T>(dim()));
  return g;
}

template <typename T>
void Model<T>::backward(const InstanceView& inst, const ForwardTrace<T>& trace,
                        const DiceGate& gate, Gradients<T>& grads, T weight) const {
  const double dz = sigmoid(static_cast<double>(trace.z)) - static_cast<double>(inst.label);
  backward_from_score(inst, trace, gate, static_cast<T>(dz) * weight, grads);
}

template <typename T>
void Model<T>::backward_from_score(const InstanceView& inst, const ForwardTrace<T>& trace,
                                   const DiceGate& gate, T dz, Gradients<T>& grads) const {
  const std::size_t dim = this->dim();
  const std::size_t width = fwbi_.width();
  if (options_.head_activation == Activation::kRelu && trace.z_pre <= T(0)) dz = T(0);

  std::vector<T> g_hf(head_.w.size());
  for (std::size_t i = 0; i < g_hf.size(); ++i) {
    grads.head[i] += dz * trace.h_f[i];
    g_hf[i] = dz * head_.w[i];
  }

  std::vector<T> field_grads(schema_.hierarchy_count() * dim, T(0));
  std::vector<T> feature_grads(schema_.field_count() * dim, T(0));
  if (!mlp_.layers.empty()) {
    mlp_backward(mlp_, trace.mlp, std::span<const T>(g_hf).subspan(width), grads.mlp,
                 std::span<T>(field_grads));
  }
  fwbi_backward(fwbi_, schema_, inst, trace.embedded, trace.fwbi, gate, options_.fwbi_activation,
                std::span<const T>(g_hf).first(width), grads.fwbi, std::span<T>(field_grads),
                std::span<T>(feature_grads));

  for (std::size_t n = 0; n < schema_.field_count(); ++n) {
    const T* g_m = field_grads.data() + schema_.fields[n].hierarchy * dim;
    T* g_n = feature_grads.data() + n * dim;
    for (std::size_t k = 0; k < dim; ++k) g_n[k] += g_m[k];
  }
  embedding_backward(inst, std::span<const T>(feature_grads), dim, grads.embedding);
}

#define FIELDCTR_INSTANTIATE(T)                                                                 \
  template struct MlpParams<T>;                                                                 \
  template struct Gradients<T>;                                                                 \
  template class Model<T>;                                                                      \
  template void mlp_forward<T>(const MlpParams<T>&, std::span<const T>, MlpTrace<T>&);          \
  template void mlp_backward<T>(const MlpParams<T>&, const MlpTrace<T>&, std::span<const T>,    \
                                std::vector<DenseLayer<T>>&, std::span<T>);

FIELDCTR_INSTANTIATE(float)
FIELDCTR_INSTANTIATE(double)
#undef FIELDCTR_INSTANTIATE

}  // namespace fieldctr

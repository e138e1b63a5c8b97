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

#ifndef FIELDCTR_NETWORK_H_
#define FIELDCTR_NETWORK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fieldctr/config.h"
#include "fieldctr/dicefactor.h"
#include "fieldctr/embedding.h"
#include "fieldctr/fwbi.h"
#include "fieldctr/schema.h"

namespace fieldctr {

inline constexpr double kProbabilityClamp = 1e-7;

// Fully connected layer, weight is out x in row-major.
template <typename T>
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<T> weight;
  std::vector<T> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t in_, std::size_t out_)
      : in(in_), out(out_), weight(in_ * out_, T(0)), bias(out_, T(0)) {}

  bool operator==(const DenseLayer&) const = default;
};

template <typename T>
struct MlpParams {
  std::size_t input_width = 0;
  std::vector<DenseLayer<T>> layers;

  MlpParams() = default;
  MlpParams(std::size_t input, std::span<const std::size_t> widths);
  // d_L; 0 when there are no layers.
  std::size_t output_width() const { return layers.empty() ? 0 : layers.back().out; }

  bool operator==(const MlpParams&) const = default;
};

// h[0] is the input, h[l] the ReLU output of layer l.
template <typename T>
struct MlpTrace {
  std::vector<std::vector<T>> h;
  std::span<const T> output() const {
    return h.size() <= 1 ? std::span<const T>() : std::span<const T>(h.back());
  }
};

// Throws ShapeMismatch when h0 or consecutive widths do not line up.
template <typename T>
void mlp_forward(const MlpParams<T>& params, std::span<const T> h0, MlpTrace<T>& trace);

// Accumulates weight/bias gradients into `grads` (same shapes as params) and
// writes dL/dh0 into `input_grad`.
template <typename T>
void mlp_backward(const MlpParams<T>& params, const MlpTrace<T>& trace,
                  std::span<const T> upstream, std::vector<DenseLayer<T>>& grads,
                  std::span<T> input_grad);

template <typename T>
struct HeadParams {
  std::vector<T> w;  // w_F over concat(h_FwBI, h_L)

  bool operator==(const HeadParams&) const = default;
};

template <typename T>
struct ForwardTrace {
  EmbeddedInstance<T> embedded;
  FwBITrace<T> fwbi;
  MlpTrace<T> mlp;
  std::vector<T> h_f;
  T z_pre = T(0);  // w_F^T h_F
  T z = T(0);      // after the optional head activation
  double p = 0.5;  // clamped sigmoid(z)
};

// Gradient buffers mirroring the model's trainable tensors. Embedding and
// linear-weight gradients are sparse over touched columns.
template <typename T>
struct Gradients {
  FwBIGradients<T> fwbi;
  std::vector<DenseLayer<T>> mlp;
  std::vector<T> head;
  std::vector<SparseRowGradient<T>> embedding;

  void clear();
};

// -[y log p + (1 - y) log(1 - p)]; throws DomainError unless 0 < p < 1.
double logloss(double y, double p);

double sigmoid(double z);

template <typename T>
class Model {
 public:
  Model() = default;
  // `schema` must be resolved. Parameters start at zero (pinned groups at
  // their pinned values); call initialize() for a random start.
  Model(FieldSchema schema, ModelOptions options);
  explicit Model(ModelSpec spec) : Model(std::move(spec.schema), std::move(spec.options)) {}

  void initialize(std::uint64_t seed);

  const FieldSchema& schema() const { return schema_; }
  const ModelOptions& options() const { return options_; }
  std::size_t dim() const { return options_.embed_dim; }

  EmbeddingTable<T>& embedding() { return embedding_; }
  const EmbeddingTable<T>& embedding() const { return embedding_; }
  FwBIParams<T>& fwbi() { return fwbi_; }
  const FwBIParams<T>& fwbi() const { return fwbi_; }
  MlpParams<T>& mlp() { return mlp_; }
  const MlpParams<T>& mlp() const { return mlp_; }
  HeadParams<T>& head() { return head_; }
  const HeadParams<T>& head() const { return head_; }

  // Gate used at inference: beta-scaling, or pass-through when DiceFactor
  // is disabled. Never consumes randomness.
  DiceGate inference_gate() const;

  // Full pass; returns the clamped click probability.
  double forward(const InstanceView& inst, const DiceGate& gate, ForwardTrace<T>& trace) const;
  double predict(const InstanceView& inst) const;

  Gradients<T> make_gradients() const;
  // Accumulates weight * dL/dtheta of the log loss for one example.
  void backward(const InstanceView& inst, const ForwardTrace<T>& trace, const DiceGate& gate,
                Gradients<T>& grads, T weight = T(1)) const;
  // Same, for an arbitrary upstream dL/dz (score-level gradients).
  void backward_from_score(const InstanceView& inst, const ForwardTrace<T>& trace,
                           const DiceGate& gate, T dz, Gradients<T>& grads) const;

  // Pinned entries are excluded from optimization.
  bool r_pinned(std::size_t i, std::size_t j) const {
    return i == j ? options_.fixed_diagonal.has_value() : options_.fixed_off_diagonal.has_value();
  }
  bool projection_pinned() const { return options_.identity_projection; }
  bool head_pinned() const { return options_.sum_head; }

  bool operator==(const Model&) const = default;

 private:
  void apply_pins();

  FieldSchema schema_;
  ModelOptions options_;
  EmbeddingTable<T> embedding_;
  FwBIParams<T> fwbi_;
  MlpParams<T> mlp_;
  HeadParams<T> head_;
};

}  // namespace fieldctr

#endif  // FIELDCTR_NETWORK_H_

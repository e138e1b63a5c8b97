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

#ifndef FIELDCTR_FWBI_H_
#define FIELDCTR_FWBI_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fieldctr/config.h"
#include "fieldctr/dicefactor.h"
#include "fieldctr/embedding.h"
#include "fieldctr/schema.h"

namespace fieldctr {

// Symmetric M x M field-pair weights, upper triangle stored row by row:
// M(M+1)/2 entries. The diagonal weights the intra-field FM term.
template <typename T>
class PairWeights {
 public:
  PairWeights() = default;
  explicit PairWeights(std::size_t fields, T init = T(1))
      : fields_(fields), data_(fields * (fields + 1) / 2, init) {}

  T& operator()(std::size_t i, std::size_t j) { return data_[index(i, j)]; }
  T operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }

  std::size_t index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return i * (2 * fields_ - i + 1) / 2 + (j - i);
  }
  std::size_t fields() const { return fields_; }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const PairWeights&) const = default;

 private:
  std::size_t fields_ = 0;
  std::vector<T> data_;
};

template <typename T>
struct FwBIParams {
  std::size_t dim = 0;
  T w0 = T(0);
  std::vector<std::vector<T>> linear;  // w_n[j], one vector per feature field
  PairWeights<T> r;
  // W_FwBI, (dim+1) x (dim+1) row-major; h_FwBI[j] = act(sum_i W[i][j] h_in[i]).
  std::vector<T> projection;

  FwBIParams() = default;
  FwBIParams(std::span<const std::size_t> cardinalities, std::size_t hierarchies,
             std::size_t dim);

  std::size_t width() const { return dim + 1; }
  T& proj(std::size_t i, std::size_t j) { return projection[i * width() + j]; }
  T proj(std::size_t i, std::size_t j) const { return projection[i * width() + j]; }
  void set_identity_projection();

  bool operator==(const FwBIParams&) const = default;
};

// h_S = w0 + sum of linear weights at the active indices.
template <typename T>
T linear_term(const FwBIParams<T>& params, const InstanceView& inst);

// h_MF = sum_{i<j} r[i][j] e_i (.) e_j over the M pooled vectors
// (flat M x dim). Pairs are visited in ascending (i, j) order.
template <typename T>
void mf_term(std::span<const T> field_vecs, std::size_t dim, const PairWeights<T>& r,
             std::span<T> out);

template <typename T>
std::vector<T> mf_term(std::span<const T> field_vecs, std::size_t dim, const PairWeights<T>& r) {
  std::vector<T> out(dim);
  mf_term(field_vecs, dim, r, std::span<T>(out));
  return out;
}

// h_FM = sum_m r[m][m] (hf_m - ht_m) with hf_m = e_m (.) e_m and
// ht_m = sum_{F(n)=m} e_n (.) e_n. When `hf`/`ht` are non-empty (M x dim)
// they receive the per-field intermediates.
template <typename T>
void fm_term(const EmbeddedInstance<T>& embedded, const FieldSchema& schema,
             const PairWeights<T>& r, std::span<T> out, std::span<T> hf = {},
             std::span<T> ht = {});

template <typename T>
std::vector<T> fm_term(const EmbeddedInstance<T>& embedded, const FieldSchema& schema,
                       const PairWeights<T>& r) {
  std::vector<T> out(embedded.dim);
  fm_term(embedded, schema, r, std::span<T>(out));
  return out;
}

template <typename T>
struct FwBITrace {
  T h_s = T(0);
  std::vector<T> h_mf;
  std::vector<T> h_fm;
  std::vector<T> hf;  // M x dim
  std::vector<T> ht;  // M x dim
  std::vector<T> h_in;   // [h_S, gate (.) (h_MF + h_FM)]
  std::vector<T> pre;    // W^T h_in
  std::vector<T> out;    // h_FwBI
};

template <typename T>
void fwbi_forward(const FwBIParams<T>& params, const FieldSchema& schema,
                  const InstanceView& inst, const EmbeddedInstance<T>& embedded,
                  const DiceGate& gate, Activation activation, FwBITrace<T>& trace);

template <typename T>
struct FwBIGradients {
  T w0 = T(0);
  std::vector<SparseRowGradient<T>> linear;
  std::vector<T> r;
  std::vector<T> projection;

  void clear();
};

template <typename T>
FwBIGradients<T> make_fwbi_gradients(const FwBIParams<T>& params);

// Accumulates parameter gradients and adds dL/de_m into `field_grads`
// (M x dim) and the direct dL/de_n of the FM term into `feature_grads`
// (N x dim). The ReLU subgradient at 0 is 0.
template <typename T>
void fwbi_backward(const FwBIParams<T>& params, const FieldSchema& schema,
                   const InstanceView& inst, const EmbeddedInstance<T>& embedded,
                   const FwBITrace<T>& trace, const DiceGate& gate, Activation activation,
                   std::span<const T> upstream, FwBIGradients<T>& grads,
                   std::span<T> field_grads, std::span<T> feature_grads);

// Special cases of the full model. FM: one hierarchical field, r = 1/2,
// identity projection and activation, no MLP, summing head. FwFM: one
// hierarchical field per feature field, no intra-field term. Linear: only the
// bias and per-value weights remain.
ModelSpec make_fm_config(const FieldSchema& schema, ModelOptions base = {});
ModelSpec make_fwfm_config(const FieldSchema& schema, ModelOptions base = {});
ModelSpec make_linear_config(const FieldSchema& schema, ModelOptions base = {});
ModelSpec make_config(Variant variant, const FieldSchema& schema, ModelOptions base = {});

}  // namespace fieldctr

#endif  // FIELDCTR_FWBI_H_

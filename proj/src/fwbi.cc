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

#include "fieldctr/fwbi.h"

#include <string>

#include "fieldctr/errors.h"

namespace fieldctr {

template <typename T>
FwBIParams<T>::FwBIParams(std::span<const std::size_t> cardinalities, std::size_t hierarchies,
                          std::size_t dim_)
    : dim(dim_), r(hierarchies, T(1)), projection((dim_ + 1) * (dim_ + 1), T(0)) {
  linear.reserve(cardinalities.size());
  for (const auto k : cardinalities) linear.emplace_back(k, T(0));
}

template <typename T>
void FwBIParams<T>::set_identity_projection() {
  std::fill(projection.begin(), projection.end(), T(0));
  for (std::size_t i = 0; i < width(); ++i) proj(i, i) = T(1);
}

template <typename T>
T linear_term(const FwBIParams<T>& params, const InstanceView& inst) {
  T h = params.w0;
  for (std::size_t n = 0; n < inst.field_count(); ++n) {
    const auto& w = params.linear[n];
    for (const auto idx : inst.field(n)) {
      if (idx >= w.size()) {
        throw IndexOutOfRange("linear index " + std::to_string(idx) + " out of range in field " +
                              std::to_string(n));
      }
      h += w[idx];
    }
  }
  return h;
}

template <typename T>
void mf_term(std::span<const T> field_vecs, std::size_t dim, const PairWeights<T>& r,
             std::span<T> out) {
  const std::size_t fields = field_vecs.size() / dim;
  std::fill(out.begin(), out.end(), T(0));
  for (std::size_t i = 0; i < fields; ++i) {
    const T* e_i = field_vecs.data() + i * dim;
    for (std::size_t j = i + 1; j < fields; ++j) {
      const T* e_j = field_vecs.data() + j * dim;
      const T w = r(i, j);
      for (std::size_t k = 0; k < dim; ++k) out[k] += e_i[k] * e_j[k] * w;
    }
  }
}

template <typename T>
void fm_term(const EmbeddedInstance<T>& embedded, const FieldSchema& schema,
             const PairWeights<T>& r, std::span<T> out, std::span<T> hf, std::span<T> ht) {
  const std::size_t dim = embedded.dim;
  const std::size_t fields = schema.hierarchy_count();
  std::vector<T> hf_local;
  std::vector<T> ht_local;
  if (hf.empty()) {
    hf_local.resize(fields * dim);
    hf = hf_local;
  }
  if (ht.empty()) {
    ht_local.resize(fields * dim);
    ht = ht_local;
  }
  std::fill(ht.begin(), ht.end(), T(0));
  for (std::size_t n = 0; n < schema.field_count(); ++n) {
    const auto e_n = embedded.feature(n);
    T* acc = ht.data() + schema.fields[n].hierarchy * dim;
    for (std::size_t k = 0; k < dim; ++k) acc[k] += e_n[k] * e_n[k];
  }
  std::fill(out.begin(), out.end(), T(0));
  for (std::size_t m = 0; m < fields; ++m) {
    const auto e_m = embedded.field(m);
    T* sq = hf.data() + m * dim;
    const T* tt = ht.data() + m * dim;
    const T w = r(m, m);
    for (std::size_t k = 0; k < dim; ++k) {
      sq[k] = e_m[k] * e_m[k];
      out[k] += (sq[k] - tt[k]) * w;
    }
  }
}

template <typename T>
void fwbi_forward(const FwBIParams<T>& params, const FieldSchema& schema,
                  const InstanceView& inst, const EmbeddedInstance<T>& embedded,
                  const DiceGate& gate, Activation activation, FwBITrace<T>& trace) {
  const std::size_t dim = params.dim;
  const std::size_t width = params.width();
  const std::size_t fields = schema.hierarchy_count();
  if (gate.dim() != dim) {
    throw LengthMismatch("dice gate length " + std::to_string(gate.dim()) + " != " +
                         std::to_string(dim));
  }
  if (embedded.dim != dim || params.r.fields() != fields) {
    throw ShapeMismatch("interaction layer shape does not match its inputs");
  }
  trace.h_s = linear_term(params, inst);
  trace.h_mf.resize(dim);
  trace.h_fm.resize(dim);
  trace.hf.resize(fields * dim);
  trace.ht.resize(fields * dim);
  mf_term(std::span<const T>(embedded.field_vecs), dim, params.r, std::span<T>(trace.h_mf));
  fm_term(embedded, schema, params.r, std::span<T>(trace.h_fm), std::span<T>(trace.hf),
          std::span<T>(trace.ht));

  trace.h_in.resize(width);
  trace.h_in[0] = trace.h_s;
  for (std::size_t k = 0; k < dim; ++k) {
    trace.h_in[k + 1] = (trace.h_mf[k] + trace.h_fm[k]) * static_cast<T>(gate.factor(k));
  }

  trace.pre.assign(width, T(0));
  for (std::size_t i = 0; i < width; ++i) {
    const T x = trace.h_in[i];
    const T* row = params.projection.data() + i * width;
    for (std::size_t j = 0; j < width; ++j) trace.pre[j] += row[j] * x;
  }
  trace.out.resize(width);
  for (std::size_t j = 0; j < width; ++j) {
    trace.out[j] = activation == Activation::kRelu && trace.pre[j] <= T(0) ? T(0) : trace.pre[j];
  }
}

template <typename T>
void FwBIGradients<T>::clear() {
  w0 = T(0);
  for (auto& g : linear) g.clear();
  std::fill(r.begin(), r.end(), T(0));
  std::fill(projection.begin(), projection.end(), T(0));
}

template <typename T>
FwBIGradients<T> make_fwbi_gradients(const FwBIParams<T>& params) {
  FwBIGradients<T> g;
  g.linear.assign(params.linear.size(), SparseRowGradient<T>(1));
  g.r.assign(params.r.data().size(), T(0));
  g.projection.assign(params.projection.size(), T(0));
  return g;
}

template <typename T>
void fwbi_backward(const FwBIParams<T>& params, const FieldSchema& schema,
                   const InstanceView& inst, const EmbeddedInstance<T>& embedded,
                   const FwBITrace<T>& trace, const DiceGate& gate, Activation activation,
                   std::span<const T> upstream, FwBIGradients<T>& grads,
                   std::span<T> field_grads, std::span<T> feature_grads) {
  const std::size_t dim = params.dim;
  const std::size_t width = params.width();
  const std::size_t fields = schema.hierarchy_count();

  std::vector<T> g_pre(width);
  for (std::size_t j = 0; j < width; ++j) {
    g_pre[j] = activation == Activation::kRelu && trace.pre[j] <= T(0) ? T(0) : upstream[j];
  }
  std::vector<T> g_in(width, T(0));
  for (std::size_t i = 0; i < width; ++i) {
    const T x = trace.h_in[i];
    const T* row = params.projection.data() + i * width;
    T* grow = grads.projection.data() + i * width;
    T acc = T(0);
    for (std::size_t j = 0; j < width; ++j) {
      grow[j] += x * g_pre[j];
      acc += row[j] * g_pre[j];
    }
    g_in[i] = acc;
  }

  grads.w0 += g_in[0];
  for (std::size_t n = 0; n < inst.field_count(); ++n) {
    for (const auto idx : inst.field(n)) grads.linear[n].row(idx)[0] += g_in[0];
  }

  std::vector<T> g_int(dim);
  bool any = false;
  for (std::size_t k = 0; k < dim; ++k) {
    g_int[k] = g_in[k + 1] * static_cast<T>(gate.factor(k));
    any = any || g_int[k] != T(0);
  }
  if (!any) return;

  for (std::size_t i = 0; i < fields; ++i) {
    const auto e_i = embedded.field(i);
    for (std::size_t j = i + 1; j < fields; ++j) {
      const auto e_j = embedded.field(j);
      const T w = params.r(i, j);
      T dr = T(0);
      T* g_i = field_grads.data() + i * dim;
      T* g_j = field_grads.data() + j * dim;
      for (std::size_t k = 0; k < dim; ++k) {
        dr += g_int[k] * e_i[k] * e_j[k];
        g_i[k] += w * g_int[k] * e_j[k];
        g_j[k] += w * g_int[k] * e_i[k];
      }
      grads.r[params.r.index(i, j)] += dr;
    }
  }

  for (std::size_t m = 0; m < fields; ++m) {
    const auto e_m = embedded.field(m);
    const T* hf = trace.hf.data() + m * dim;
    const T* ht = trace.ht.data() + m * dim;
    const T two_w = T(2) * params.r(m, m);
    T dr = T(0);
    T* g_m = field_grads.data() + m * dim;
    for (std::size_t k = 0; k < dim; ++k) {
      dr += g_int[k] * (hf[k] - ht[k]);
      g_m[k] += two_w * g_int[k] * e_m[k];
    }
    grads.r[params.r.index(m, m)] += dr;
  }
  for (std::size_t n = 0; n < schema.field_count(); ++n) {
    const auto e_n = embedded.feature(n);
    const T two_w = T(2) * params.r(schema.fields[n].hierarchy, schema.fields[n].hierarchy);
    T* g_n = feature_grads.data() + n * dim;
    for (std::size_t k = 0; k < dim; ++k) g_n[k] -= two_w * g_int[k] * e_n[k];
  }
}

namespace {

ModelOptions bypass(ModelOptions opts, Variant variant) {
  opts.variant = variant;
  opts.fwbi_activation = Activation::kIdentity;
  opts.head_activation = Activation::kIdentity;
  opts.mlp.clear();
  opts.identity_projection = true;
  opts.sum_head = true;
  opts.dice.enabled = false;
  return opts;
}

}  // namespace

ModelSpec make_fm_config(const FieldSchema& schema, ModelOptions base) {
  ModelSpec spec{schema, bypass(std::move(base), Variant::kFm)};
  spec.schema.hierarchies = {"all"};
  for (auto& f : spec.schema.fields) f.hierarchy = 0;
  spec.options.fixed_diagonal = 0.5;
  spec.options.fixed_off_diagonal.reset();
  return spec;
}

ModelSpec make_fwfm_config(const FieldSchema& schema, ModelOptions base) {
  ModelSpec spec{schema, bypass(std::move(base), Variant::kFwfm)};
  spec.schema.hierarchies.clear();
  for (std::size_t n = 0; n < spec.schema.fields.size(); ++n) {
    spec.schema.hierarchies.push_back(spec.schema.fields[n].name);
    spec.schema.fields[n].hierarchy = n;
  }
  spec.options.fixed_diagonal = 0.0;
  spec.options.fixed_off_diagonal.reset();
  return spec;
}

ModelSpec make_linear_config(const FieldSchema& schema, ModelOptions base) {
  ModelSpec spec{schema, bypass(std::move(base), Variant::kLinear)};
  spec.options.fixed_diagonal = 0.0;
  spec.options.fixed_off_diagonal = 0.0;
  return spec;
}

ModelSpec make_config(Variant variant, const FieldSchema& schema, ModelOptions base) {
  switch (variant) {
    case Variant::kFm: return make_fm_config(schema, std::move(base));
    case Variant::kFwfm: return make_fwfm_config(schema, std::move(base));
    case Variant::kLinear: return make_linear_config(schema, std::move(base));
    case Variant::kFlen: break;
  }
  base.variant = Variant::kFlen;
  return {schema, std::move(base)};
}

#define FIELDCTR_INSTANTIATE(T)                                                                 \
  template struct FwBIParams<T>;                                                                \
  template struct FwBIGradients<T>;                                                             \
  template T linear_term<T>(const FwBIParams<T>&, const InstanceView&);                         \
  template void mf_term<T>(std::span<const T>, std::size_t, const PairWeights<T>&, std::span<T>); \
  template void fm_term<T>(const EmbeddedInstance<T>&, const FieldSchema&, const PairWeights<T>&, \
                           std::span<T>, std::span<T>, std::span<T>);                           \
  template void fwbi_forward<T>(const FwBIParams<T>&, const FieldSchema&, const InstanceView&,  \
                                const EmbeddedInstance<T>&, const DiceGate&, Activation,        \
                                FwBITrace<T>&);                                                 \
  template FwBIGradients<T> make_fwbi_gradients<T>(const FwBIParams<T>&);                       \
  template void fwbi_backward<T>(const FwBIParams<T>&, const FieldSchema&, const InstanceView&, \
                                 const EmbeddedInstance<T>&, const FwBITrace<T>&,               \
                                 const DiceGate&, Activation, std::span<const T>,               \
                                 FwBIGradients<T>&, std::span<T>, std::span<T>);

FIELDCTR_INSTANTIATE(float)
FIELDCTR_INSTANTIATE(double)
#undef FIELDCTR_INSTANTIATE

}  // namespace fieldctr

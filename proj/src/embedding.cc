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

#include "fieldctr/embedding.h"

#include <cmath>
#include <string>

#include "fieldctr/errors.h"

namespace fieldctr {

template <typename T>
EmbeddingTable<T>::EmbeddingTable(std::span<const std::size_t> cardinalities, std::size_t dim)
    : dim_(dim) {
  if (dim == 0) throw ShapeMismatch("embedding dimension must be positive");
  tables_.reserve(cardinalities.size());
  for (const auto k : cardinalities) tables_.emplace_back(k * dim, T(0));
}

template <typename T>
void EmbeddingTable<T>::initialize(std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim_));
  for (auto& t : tables_) {
    for (auto& v : t) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      v = static_cast<T>((2.0 * u - 1.0) * bound);
    }
  }
}

template <typename T>
void EmbeddingTable<T>::embed_feature(std::size_t field, std::span<const std::uint32_t> actives,
                                      std::span<T> out) const {
  const std::size_t k = cardinality(field);
  std::fill(out.begin(), out.end(), T(0));
  for (const auto idx : actives) {
    if (idx >= k) {
      throw IndexOutOfRange("embedding index " + std::to_string(idx) + " >= cardinality " +
                            std::to_string(k) + " in field " + std::to_string(field));
    }
    const T* col = tables_[field].data() + static_cast<std::size_t>(idx) * dim_;
    for (std::size_t d = 0; d < dim_; ++d) out[d] += col[d];
  }
}

template <typename T>
void embed_instance(const EmbeddingTable<T>& table, const FieldSchema& schema,
                    const InstanceView& inst, EmbeddedInstance<T>& out) {
  const std::size_t dim = table.dim();
  const std::size_t n_fields = schema.field_count();
  if (inst.field_count() != n_fields || table.field_count() != n_fields) {
    throw ShapeMismatch("instance/table field count does not match schema");
  }
  out.dim = dim;
  out.feature_vecs.assign(n_fields * dim, T(0));
  out.field_vecs.assign(schema.hierarchy_count() * dim, T(0));
  for (std::size_t n = 0; n < n_fields; ++n) {
    std::span<T> e_n(out.feature_vecs.data() + n * dim, dim);
    table.embed_feature(n, inst.field(n), e_n);
    T* e_m = out.field_vecs.data() + schema.fields[n].hierarchy * dim;
    for (std::size_t d = 0; d < dim; ++d) e_m[d] += e_n[d];
  }
}

template <typename T>
std::span<T> SparseRowGradient<T>::row(std::uint32_t index) {
  const auto [it, inserted] = slot_.try_emplace(index, touched_.size());
  if (inserted) {
    touched_.push_back(index);
    data_.resize(data_.size() + width_, T(0));
  }
  return {data_.data() + it->second * width_, width_};
}

template <typename T>
void SparseRowGradient<T>::clear() {
  slot_.clear();
  touched_.clear();
  data_.clear();
}

template <typename T>
void embedding_backward(const InstanceView& inst, std::span<const T> feature_grads,
                        std::size_t dim, std::vector<SparseRowGradient<T>>& grads) {
  for (std::size_t n = 0; n < inst.field_count(); ++n) {
    const T* g = feature_grads.data() + n * dim;
    for (const auto idx : inst.field(n)) {
      auto row = grads[n].row(idx);
      for (std::size_t d = 0; d < dim; ++d) row[d] += g[d];
    }
  }
}

#define FIELDCTR_INSTANTIATE(T)                                                              \
  template class EmbeddingTable<T>;                                                          \
  template class SparseRowGradient<T>;                                                       \
  template void embed_instance<T>(const EmbeddingTable<T>&, const FieldSchema&,              \
                                  const InstanceView&, EmbeddedInstance<T>&);                \
  template void embedding_backward<T>(const InstanceView&, std::span<const T>, std::size_t,    \
                                      std::vector<SparseRowGradient<T>>&);

FIELDCTR_INSTANTIATE(float)
FIELDCTR_INSTANTIATE(double)
#undef FIELDCTR_INSTANTIATE

}  // namespace fieldctr

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

#ifndef FIELDCTR_EMBEDDING_H_
#define FIELDCTR_EMBEDDING_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "fieldctr/schema.h"

namespace fieldctr {

// Per-field embedding matrices V_n of shape dim x K_n, stored column-major so
// column j (the vector of value j) is contiguous.
template <typename T>
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::span<const std::size_t> cardinalities, std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t field_count() const { return tables_.size(); }
  std::size_t cardinality(std::size_t field) const { return tables_[field].size() / dim_; }

  std::span<T> column(std::size_t field, std::uint32_t index) {
    return {tables_[field].data() + static_cast<std::size_t>(index) * dim_, dim_};
  }
  std::span<const T> column(std::size_t field, std::uint32_t index) const {
    return {tables_[field].data() + static_cast<std::size_t>(index) * dim_, dim_};
  }
  std::vector<T>& matrix(std::size_t field) { return tables_[field]; }
  const std::vector<T>& matrix(std::size_t field) const { return tables_[field]; }

  // Uniform in [-1/sqrt(dim), 1/sqrt(dim)].
  void initialize(std::mt19937_64& rng);

  // out = V_n x_n: sum of the selected columns. Throws IndexOutOfRange.
  void embed_feature(std::size_t field, std::span<const std::uint32_t> actives,
                     std::span<T> out) const;

  bool operator==(const EmbeddingTable&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::vector<T>> tables_;
};

template <typename T>
std::vector<T> embed_feature(const EmbeddingTable<T>& table, std::size_t field,
                             std::span<const std::uint32_t> actives) {
  std::vector<T> out(table.dim());
  table.embed_feature(field, actives, out);
  return out;
}

// e_m = sum of the contributing e_n; the zero vector when there are none.
template <typename T>
std::vector<T> pool_field(const std::vector<std::vector<T>>& feature_vecs, std::size_t dim) {
  std::vector<T> out(dim, T(0));
  for (const auto& v : feature_vecs) {
    for (std::size_t k = 0; k < dim; ++k) out[k] += v[k];
  }
  return out;
}

// Per-feature vectors e_n (N x dim) and per-hierarchy pooled vectors e_m
// (M x dim), both flat row-major.
template <typename T>
struct EmbeddedInstance {
  std::size_t dim = 0;
  std::vector<T> feature_vecs;
  std::vector<T> field_vecs;

  std::span<const T> feature(std::size_t n) const { return {feature_vecs.data() + n * dim, dim}; }
  std::span<const T> field(std::size_t m) const { return {field_vecs.data() + m * dim, dim}; }
  std::size_t feature_count() const { return dim ? feature_vecs.size() / dim : 0; }
  std::size_t field_count() const { return dim ? field_vecs.size() / dim : 0; }
};

// Fills `out` (reusing its storage). Pools in ascending feature-field order.
template <typename T>
void embed_instance(const EmbeddingTable<T>& table, const FieldSchema& schema,
                    const InstanceView& inst, EmbeddedInstance<T>& out);

template <typename T>
EmbeddedInstance<T> embed_instance(const EmbeddingTable<T>& table, const FieldSchema& schema,
                                   const InstanceView& inst) {
  EmbeddedInstance<T> out;
  embed_instance(table, schema, inst, out);
  return out;
}

// Accumulates gradient rows for the columns touched in a mini-batch; only
// those rows are ever materialized.
template <typename T>
class SparseRowGradient {
 public:
  explicit SparseRowGradient(std::size_t width = 0) : width_(width) {}

  // Gradient row for `index`, zero-initialized on first touch.
  std::span<T> row(std::uint32_t index);
  void clear();

  std::size_t width() const { return width_; }
  // Touched indices in first-touch order.
  const std::vector<std::uint32_t>& touched() const { return touched_; }
  std::span<const T> row_at(std::size_t slot) const { return {data_.data() + slot * width_, width_}; }
  std::span<T> row_at(std::size_t slot) { return {data_.data() + slot * width_, width_}; }

 private:
  std::size_t width_;
  std::unordered_map<std::uint32_t, std::size_t> slot_;
  std::vector<std::uint32_t> touched_;
  std::vector<T> data_;
};

// Chains per-feature gradients dL/de_n back to the active columns of V_n:
// every active column receives dL/de_n once per occurrence.
template <typename T>
void embedding_backward(const InstanceView& inst, std::span<const T> feature_grads,
                        std::size_t dim, std::vector<SparseRowGradient<T>>& grads);

}  // namespace fieldctr

#endif  // FIELDCTR_EMBEDDING_H_

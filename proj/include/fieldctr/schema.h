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

#ifndef FIELDCTR_SCHEMA_H_
#define FIELDCTR_SCHEMA_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fieldctr {

enum class Encoding { kOneHot, kMultiHot };
enum class IndexSource { kDictionary, kHash };

// One categorical feature field (e.g. "gender"). `cardinality` is empty for a
// dictionary field declared `auto` until a vocabulary resolves it.
struct FieldDef {
  std::string name;
  std::optional<std::size_t> cardinality;
  Encoding encoding = Encoding::kOneHot;
  std::size_t hierarchy = 0;
  IndexSource source = IndexSource::kDictionary;
  std::size_t hash_buckets = 0;

  bool operator==(const FieldDef&) const = default;
};

// Feature fields plus their grouping into M hierarchical fields (user, item,
// context, ...). Every feature field belongs to exactly one hierarchy.
struct FieldSchema {
  std::vector<FieldDef> fields;
  std::vector<std::string> hierarchies;

  std::size_t field_count() const { return fields.size(); }
  std::size_t hierarchy_count() const { return hierarchies.size(); }

  // True once every field has a concrete cardinality.
  bool resolved() const;
  // Cardinalities in field order; throws SchemaError if unresolved.
  std::vector<std::size_t> cardinalities() const;
  // Feature-field indices grouped per hierarchy, ascending.
  std::vector<std::vector<std::size_t>> members() const;
  std::optional<std::size_t> find_field(std::string_view name) const;

  // Throws SchemaError on any broken invariant.
  void validate() const;

  bool operator==(const FieldSchema&) const = default;
};

// Parses the line-oriented schema document:
//
//   # comment
//   hierarchies: user, item, context
//   gender, 2, one-hot, user, dict
//   tags, auto, multi-hot, item, hash:1000
//
// Errors carry the 1-based line number and the field name.
FieldSchema parse_schema(std::string_view text);

// Inverse of parse_schema; resolved cardinalities are written as numbers.
std::string format_schema(const FieldSchema& schema);

// Non-owning view of one labeled example. Active indices for field n are
// indices[offsets[n] .. offsets[n + 1]), sorted ascending.
struct InstanceView {
  float label = 0;
  std::span<const std::uint32_t> offsets;
  std::span<const std::uint32_t> indices;

  std::size_t field_count() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::span<const std::uint32_t> field(std::size_t n) const {
    return indices.subspan(offsets[n], offsets[n + 1] - offsets[n]);
  }
};

struct Instance {
  float label = 0;
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> indices;

  // Appends the next field's actives; sorts them.
  void push_field(std::vector<std::uint32_t> actives);
  std::span<const std::uint32_t> field(std::size_t n) const { return view().field(n); }
  InstanceView view() const { return {label, offsets, indices}; }
};

// Builds an Instance from per-field active lists.
Instance make_instance(float label, const std::vector<std::vector<std::uint32_t>>& actives);

// Throws IndexOutOfRange / EncodeError when the instance breaks the schema:
// index >= cardinality, or a one-hot field without exactly one active.
void check_instance(const FieldSchema& schema, const InstanceView& inst);

// Column-compressed store of many instances.
class Dataset {
 public:
  explicit Dataset(std::size_t field_count = 0) : field_count_(field_count) {}

  void add(const InstanceView& inst);
  void add(const Instance& inst) { add(inst.view()); }

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::size_t field_count() const { return field_count_; }
  InstanceView operator[](std::size_t row) const;
  std::span<const float> labels() const { return labels_; }

 private:
  std::size_t field_count_;
  std::vector<float> labels_;
  std::vector<std::uint32_t> offsets_;   // (field_count + 1) per row, row-relative
  std::vector<std::uint64_t> row_start_; // into indices_
  std::vector<std::uint32_t> indices_;
};

}  // namespace fieldctr

#endif  // FIELDCTR_SCHEMA_H_

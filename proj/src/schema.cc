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

#include "fieldctr/schema.h"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "fieldctr/errors.h"

namespace fieldctr {

namespace {

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_trimmed(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(delim, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, std::string_view field, const std::string& what) {
  std::ostringstream os;
  os << "schema line " << line;
  if (!field.empty()) os << " (field '" << field << "')";
  os << ": " << what;
  throw SchemaError(os.str());
}

bool parse_size(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

bool FieldSchema::resolved() const {
  return std::all_of(fields.begin(), fields.end(),
                     [](const FieldDef& f) { return f.cardinality.has_value(); });
}

std::vector<std::size_t> FieldSchema::cardinalities() const {
  std::vector<std::size_t> out;
  out.reserve(fields.size());
  for (const auto& f : fields) {
    if (!f.cardinality) throw SchemaError("field '" + f.name + "' has unresolved cardinality");
    out.push_back(*f.cardinality);
  }
  return out;
}

std::vector<std::vector<std::size_t>> FieldSchema::members() const {
  std::vector<std::vector<std::size_t>> out(hierarchies.size());
  for (std::size_t n = 0; n < fields.size(); ++n) out[fields[n].hierarchy].push_back(n);
  return out;
}

std::optional<std::size_t> FieldSchema::find_field(std::string_view name) const {
  for (std::size_t n = 0; n < fields.size(); ++n) {
    if (fields[n].name == name) return n;
  }
  return std::nullopt;
}

void FieldSchema::validate() const {
  if (hierarchies.empty()) throw SchemaError("schema declares no hierarchical fields");
  if (fields.empty()) throw SchemaError("schema declares no feature fields");
  std::set<std::string_view> names;
  for (const auto& h : hierarchies) {
    if (!names.insert(h).second) throw SchemaError("duplicate hierarchy '" + h + "'");
  }
  names.clear();
  for (const auto& f : fields) {
    if (f.name.empty()) throw SchemaError("field with empty name");
    if (!names.insert(f.name).second) throw SchemaError("duplicate field '" + f.name + "'");
    if (f.hierarchy >= hierarchies.size()) {
      throw SchemaError("field '" + f.name + "' maps to hierarchy index out of range");
    }
    if (f.cardinality && *f.cardinality == 0) {
      throw SchemaError("field '" + f.name + "' has zero cardinality");
    }
    if (f.source == IndexSource::kHash) {
      if (f.hash_buckets == 0) throw SchemaError("field '" + f.name + "' has zero hash buckets");
      if (f.cardinality != f.hash_buckets) {
        throw SchemaError("field '" + f.name + "' cardinality differs from its hash buckets");
      }
    }
  }
}

FieldSchema parse_schema(std::string_view text) {
  FieldSchema schema;
  bool have_hierarchies = false;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    constexpr std::string_view kDirective = "hierarchies:";
    if (line.substr(0, kDirective.size()) == kDirective) {
      if (have_hierarchies) fail(line_no, {}, "hierarchies declared twice");
      for (auto name : split_trimmed(line.substr(kDirective.size()), ',')) {
        if (name.empty()) fail(line_no, {}, "empty hierarchy name");
        if (std::find(schema.hierarchies.begin(), schema.hierarchies.end(), name) !=
            schema.hierarchies.end()) {
          fail(line_no, {}, "duplicate hierarchy '" + std::string(name) + "'");
        }
        schema.hierarchies.emplace_back(name);
      }
      have_hierarchies = true;
      continue;
    }

    const auto cols = split_trimmed(line, ',');
    const std::string_view name = cols[0];
    if (name.empty()) fail(line_no, {}, "missing field name");
    if (cols.size() != 5) {
      fail(line_no, name,
           "expected 'name, cardinality|auto, one-hot|multi-hot, hierarchy, dict|hash:<buckets>'");
    }
    if (!have_hierarchies) fail(line_no, name, "field declared before 'hierarchies:'");
    if (!seen.insert(std::string(name)).second) fail(line_no, name, "duplicate field name");

    FieldDef def;
    def.name = std::string(name);

    if (cols[2] == "one-hot") {
      def.encoding = Encoding::kOneHot;
    } else if (cols[2] == "multi-hot") {
      def.encoding = Encoding::kMultiHot;
    } else {
      fail(line_no, name, "unknown encoding '" + std::string(cols[2]) + "'");
    }

    if (cols[3].empty()) fail(line_no, name, "missing hierarchy assignment");
    const auto h = std::find(schema.hierarchies.begin(), schema.hierarchies.end(), cols[3]);
    if (h == schema.hierarchies.end()) {
      fail(line_no, name, "undeclared hierarchy '" + std::string(cols[3]) + "'");
    }
    def.hierarchy = static_cast<std::size_t>(h - schema.hierarchies.begin());

    constexpr std::string_view kHash = "hash:";
    if (cols[4] == "dict") {
      def.source = IndexSource::kDictionary;
    } else if (cols[4].substr(0, kHash.size()) == kHash) {
      def.source = IndexSource::kHash;
      if (!parse_size(cols[4].substr(kHash.size()), def.hash_buckets) || def.hash_buckets == 0) {
        fail(line_no, name, "bad hash bucket count '" + std::string(cols[4]) + "'");
      }
    } else {
      fail(line_no, name, "unknown index source '" + std::string(cols[4]) + "'");
    }

    if (cols[1] == "auto") {
      if (def.source == IndexSource::kHash) def.cardinality = def.hash_buckets;
    } else {
      std::size_t k = 0;
      if (!parse_size(cols[1], k)) fail(line_no, name, "bad cardinality '" + std::string(cols[1]) + "'");
      if (k == 0) fail(line_no, name, "zero cardinality");
      if (def.source == IndexSource::kHash && k != def.hash_buckets) {
        fail(line_no, name, "cardinality must equal the hash bucket count");
      }
      def.cardinality = k;
    }
    schema.fields.push_back(std::move(def));
  }
  if (!have_hierarchies) throw SchemaError("schema document declares no hierarchies");
  if (schema.fields.empty()) throw SchemaError("schema document declares no fields");
  schema.validate();
  return schema;
}

std::string format_schema(const FieldSchema& schema) {
  std::ostringstream os;
  os << "hierarchies: ";
  for (std::size_t m = 0; m < schema.hierarchies.size(); ++m) {
    os << (m ? ", " : "") << schema.hierarchies[m];
  }
  os << '\n';
  for (const auto& f : schema.fields) {
    os << f.name << ", ";
    if (f.cardinality) {
      os << *f.cardinality;
    } else {
      os << "auto";
    }
    os << ", " << (f.encoding == Encoding::kOneHot ? "one-hot" : "multi-hot") << ", "
       << schema.hierarchies[f.hierarchy] << ", ";
    if (f.source == IndexSource::kHash) {
      os << "hash:" << f.hash_buckets;
    } else {
      os << "dict";
    }
    os << '\n';
  }
  return os.str();
}

void Instance::push_field(std::vector<std::uint32_t> actives) {
  std::sort(actives.begin(), actives.end());
  indices.insert(indices.end(), actives.begin(), actives.end());
  offsets.push_back(static_cast<std::uint32_t>(indices.size()));
}

Instance make_instance(float label, const std::vector<std::vector<std::uint32_t>>& actives) {
  Instance inst;
  inst.label = label;
  for (const auto& a : actives) inst.push_field(a);
  return inst;
}

void check_instance(const FieldSchema& schema, const InstanceView& inst) {
  if (inst.field_count() != schema.field_count()) {
    throw EncodeError("instance has " + std::to_string(inst.field_count()) + " fields, schema has " +
                      std::to_string(schema.field_count()));
  }
  for (std::size_t n = 0; n < schema.field_count(); ++n) {
    const auto& def = schema.fields[n];
    const auto actives = inst.field(n);
    if (def.encoding == Encoding::kOneHot && actives.size() != 1) {
      throw EncodeError("one-hot field '" + def.name + "' has " + std::to_string(actives.size()) +
                        " active indices");
    }
    for (const auto idx : actives) {
      if (!def.cardinality || idx >= *def.cardinality) {
        throw IndexOutOfRange("index " + std::to_string(idx) + " out of range for field '" +
                              def.name + "'");
      }
    }
  }
}

void Dataset::add(const InstanceView& inst) {
  if (inst.field_count() != field_count_) {
    throw ShapeMismatch("dataset expects " + std::to_string(field_count_) + " fields, got " +
                        std::to_string(inst.field_count()));
  }
  labels_.push_back(inst.label);
  row_start_.push_back(indices_.size());
  const std::uint32_t base = inst.offsets[0];
  for (const auto off : inst.offsets) offsets_.push_back(off - base);
  const auto used = inst.indices.subspan(base, inst.offsets.back() - base);
  indices_.insert(indices_.end(), used.begin(), used.end());
}

InstanceView Dataset::operator[](std::size_t row) const {
  const std::span<const std::uint32_t> offsets(offsets_.data() + row * (field_count_ + 1),
                                               field_count_ + 1);
  return {labels_[row], offsets,
          std::span<const std::uint32_t>(indices_.data() + row_start_[row], offsets.back())};
}

}  // namespace fieldctr

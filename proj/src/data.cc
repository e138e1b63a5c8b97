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

#include "fieldctr/data.h"

#include <charconv>

#include "fieldctr/errors.h"

namespace fieldctr {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

template <typename Fn>
void for_each_value(const FieldDef& def, std::string_view cell, char multi_delim, Fn&& fn) {
  if (def.encoding == Encoding::kOneHot) {
    fn(cell);
    return;
  }
  if (cell.empty()) return;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = cell.find(multi_delim, start);
    const auto value = cell.substr(start, pos == std::string_view::npos ? pos : pos - start);
    if (!value.empty()) fn(value);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
}

}  // namespace

std::vector<std::string_view> split_cells(std::string_view line, char delim) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    cells.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

ColumnLayout ColumnLayout::from_header(std::string_view header, const FieldSchema& schema,
                                       const DataFormat& format) {
  const auto cells = split_cells(strip_cr(header), format.delimiter);
  ColumnLayout layout;
  layout.width = cells.size();
  const auto find = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c] == name) return c;
    }
    return std::nullopt;
  };
  const auto label = find(format.label_column);
  if (!label) throw EncodeError("header has no label column '" + format.label_column + "'");
  layout.label_column = *label;
  for (const auto& f : schema.fields) {
    const auto col = find(f.name);
    if (!col) throw EncodeError("header has no column for schema field '" + f.name + "'");
    layout.field_columns.push_back(*col);
  }
  return layout;
}

std::uint64_t stable_hash(std::string_view value, std::uint64_t seed) {
  std::uint64_t h = kFnvOffset ^ seed;
  for (const unsigned char c : value) {
    h ^= c;
    h *= kFnvPrime;
  }
  return splitmix64(h);
}

std::uint32_t hash_index(const FieldDef& field, std::string_view value) {
  const std::uint64_t seed = stable_hash(field.name, 0);
  return static_cast<std::uint32_t>(stable_hash(value, seed) % field.hash_buckets);
}

Vocabulary::Vocabulary(const FieldSchema& schema, std::size_t max_cardinality)
    : index_(schema.field_count()),
      values_(schema.field_count()),
      limits_(schema.field_count(), 0),
      max_cardinality_(max_cardinality) {
  for (std::size_t n = 0; n < schema.field_count(); ++n) {
    const auto& f = schema.fields[n];
    if (f.source == IndexSource::kDictionary) limits_[n] = f.cardinality.value_or(max_cardinality);
  }
}

void Vocabulary::observe(std::size_t field, std::string_view value) {
  if (frozen_) throw Error("vocabulary is frozen");
  if (limits_[field] == 0) return;
  auto& map = index_[field];
  if (map.find(std::string(value)) != map.end()) return;
  if (values_[field].size() + 2 > limits_[field]) {
    throw VocabOverflow("field " + std::to_string(field) + " exceeds max cardinality " +
                        std::to_string(limits_[field]));
  }
  values_[field].emplace_back(value);
  map.emplace(std::string(value), static_cast<std::uint32_t>(values_[field].size()));
}

std::uint32_t Vocabulary::lookup(std::size_t field, std::string_view value) const {
  const auto& map = index_[field];
  const auto it = map.find(std::string(value));
  return it == map.end() ? 0 : it->second;
}

FieldSchema Vocabulary::resolve(const FieldSchema& schema) const {
  FieldSchema out = schema;
  for (std::size_t n = 0; n < out.field_count(); ++n) {
    auto& f = out.fields[n];
    if (f.source == IndexSource::kDictionary && !f.cardinality) f.cardinality = size(n);
  }
  out.validate();
  return out;
}

Vocabulary Vocabulary::from_values(std::vector<std::vector<std::string>> values,
                                   std::vector<std::size_t> limits) {
  if (values.size() != limits.size()) throw CheckpointError("vocabulary shape mismatch");
  Vocabulary v;
  v.values_ = std::move(values);
  v.limits_ = std::move(limits);
  v.index_.resize(v.values_.size());
  for (std::size_t n = 0; n < v.values_.size(); ++n) {
    for (std::size_t i = 0; i < v.values_[n].size(); ++i) {
      v.index_[n].emplace(v.values_[n][i], static_cast<std::uint32_t>(i + 1));
    }
  }
  v.frozen_ = true;
  return v;
}

TableReader::TableReader(const std::string& path) : in_(path) {
  if (!in_) throw Error("cannot open '" + path + "'");
  if (!std::getline(in_, header_)) throw EmptyData("'" + path + "' has no header line");
  if (!header_.empty() && header_.back() == '\r') header_.pop_back();
}

bool TableReader::next(std::string& line) {
  while (std::getline(in_, line)) {
    ++line_number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

float parse_label(std::string_view cell) {
  if (cell == "1" || cell == "1.0") return 1.0f;
  if (cell == "0" || cell == "0.0") return 0.0f;
  throw EncodeError("label must be 0 or 1, got '" + std::string(cell) + "'");
}

Vocabulary build_vocabulary(const RowSource& rows, const ColumnLayout& layout,
                            const FieldSchema& schema, const DataFormat& format,
                            std::size_t max_cardinality) {
  Vocabulary vocab(schema, max_cardinality);
  std::string line;
  while (rows(line)) {
    const auto cells = split_cells(strip_cr(line), format.delimiter);
    if (cells.size() != layout.width) {
      throw EncodeError("record has " + std::to_string(cells.size()) + " cells, header has " +
                        std::to_string(layout.width));
    }
    for (std::size_t n = 0; n < schema.field_count(); ++n) {
      const auto& def = schema.fields[n];
      if (def.source != IndexSource::kDictionary) continue;
      for_each_value(def, cells[layout.field_columns[n]], format.multi_hot_delimiter,
                     [&](std::string_view v) { vocab.observe(n, v); });
    }
  }
  vocab.freeze();
  return vocab;
}

Instance encode_row(std::string_view line, const ColumnLayout& layout, const FieldSchema& schema,
                    const Vocabulary& vocab, const DataFormat& format) {
  const auto cells = split_cells(strip_cr(line), format.delimiter);
  if (cells.size() != layout.width) {
    throw EncodeError("malformed record: " + std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(layout.width));
  }
  const auto label_cell = cells[layout.label_column];
  if (label_cell.empty()) throw EncodeError("missing label");

  Instance inst;
  inst.label = parse_label(label_cell);
  std::vector<std::uint32_t> actives;
  for (std::size_t n = 0; n < schema.field_count(); ++n) {
    const auto& def = schema.fields[n];
    actives.clear();
    for_each_value(def, cells[layout.field_columns[n]], format.multi_hot_delimiter,
                   [&](std::string_view v) {
                     actives.push_back(def.source == IndexSource::kHash ? hash_index(def, v)
                                                                        : vocab.lookup(n, v));
                   });
    for (const auto idx : actives) {
      if (!def.cardinality || idx >= *def.cardinality) {
        throw IndexOutOfRange("field '" + def.name + "': index " + std::to_string(idx) +
                              " exceeds cardinality");
      }
    }
    inst.push_field(actives);
  }
  return inst;
}

Vocabulary build_vocabulary_from_file(const std::string& path, const FieldSchema& schema,
                                      const DataFormat& format, std::size_t max_cardinality) {
  TableReader reader(path);
  const auto layout = ColumnLayout::from_header(reader.header(), schema, format);
  return build_vocabulary([&](std::string& line) { return reader.next(line); }, layout, schema,
                          format, max_cardinality);
}

Dataset load_dataset(const std::string& path, const FieldSchema& schema, const Vocabulary& vocab,
                     const DataFormat& format, std::size_t max_rows) {
  TableReader reader(path);
  const auto layout = ColumnLayout::from_header(reader.header(), schema, format);
  Dataset data(schema.field_count());
  std::string line;
  while ((max_rows == 0 || data.size() < max_rows) && reader.next(line)) {
    try {
      data.add(encode_row(line, layout, schema, vocab, format));
    } catch (const EncodeError& e) {
      throw EncodeError(path + ":" + std::to_string(reader.line_number()) + ": " + e.what());
    }
  }
  return data;
}

}  // namespace fieldctr

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

#ifndef FIELDCTR_DATA_H_
#define FIELDCTR_DATA_H_

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fieldctr/schema.h"

namespace fieldctr {

struct DataFormat {
  char delimiter = ',';
  char multi_hot_delimiter = '|';
  std::string label_column = "label";
};

// Splits on `delim` without quoting rules; empty cells are kept.
std::vector<std::string_view> split_cells(std::string_view line, char delim);

// Maps schema fields and the label onto columns of a header line.
struct ColumnLayout {
  std::size_t width = 0;
  std::size_t label_column = 0;
  std::vector<std::size_t> field_columns;

  // Throws EncodeError when the label or any schema field is missing.
  static ColumnLayout from_header(std::string_view header, const FieldSchema& schema,
                                  const DataFormat& format);
};

// Stable across runs and platforms: FNV-1a 64 seeded with `seed`, then a
// splitmix64 finalizer.
std::uint64_t stable_hash(std::string_view value, std::uint64_t seed);

// Index of `value` in a hash-mode field.
std::uint32_t hash_index(const FieldDef& field, std::string_view value);

inline constexpr std::size_t kDefaultMaxCardinality = 10'000'000;

// Dictionary-mode value -> index maps. Index 0 is reserved for values never
// seen while building; the rest follow first-seen order. Building is
// single-writer; lookups after freeze() are safe from any thread.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(const FieldSchema& schema,
                      std::size_t max_cardinality = kDefaultMaxCardinality);

  // Records one value of a dictionary field. Hash fields are ignored.
  void observe(std::size_t field, std::string_view value);
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  std::uint32_t lookup(std::size_t field, std::string_view value) const;
  // distinct + 1 for dictionary fields.
  std::size_t size(std::size_t field) const { return values_[field].size() + 1; }
  std::size_t field_count() const { return values_.size(); }
  // Values of `field` in index order, starting at index 1.
  const std::vector<std::string>& values(std::size_t field) const { return values_[field]; }
  std::size_t max_cardinality() const { return max_cardinality_; }

  // Schema copy with `auto` dictionary cardinalities replaced by size().
  FieldSchema resolve(const FieldSchema& schema) const;

  // Rebuilds from stored value lists (checkpoint loading).
  static Vocabulary from_values(std::vector<std::vector<std::string>> values,
                                std::vector<std::size_t> limits);
  const std::vector<std::size_t>& limits() const { return limits_; }

  bool operator==(const Vocabulary& other) const {
    return values_ == other.values_ && limits_ == other.limits_;
  }

 private:
  std::vector<std::unordered_map<std::string, std::uint32_t>> index_;
  std::vector<std::vector<std::string>> values_;
  std::vector<std::size_t> limits_;  // per-field max cardinality (0 = no dict)
  std::size_t max_cardinality_ = kDefaultMaxCardinality;
  bool frozen_ = false;
};

// Reads a header-bearing delimited file line by line.
class TableReader {
 public:
  explicit TableReader(const std::string& path);

  const std::string& header() const { return header_; }
  // False at end of file. Blank lines are skipped.
  bool next(std::string& line);
  std::size_t line_number() const { return line_number_; }

 private:
  std::ifstream in_;
  std::string header_;
  std::size_t line_number_ = 1;
};

using RowSource = std::function<bool(std::string&)>;

// Streams rows and assigns dictionary indices in first-seen order. The
// returned vocabulary is frozen.
Vocabulary build_vocabulary(const RowSource& rows, const ColumnLayout& layout,
                            const FieldSchema& schema, const DataFormat& format,
                            std::size_t max_cardinality = kDefaultMaxCardinality);

// Encodes one record. `schema` must be resolved.
Instance encode_row(std::string_view line, const ColumnLayout& layout, const FieldSchema& schema,
                    const Vocabulary& vocab, const DataFormat& format);

// Parses a label cell: "0" or "1" (also "0.0"/"1.0").
float parse_label(std::string_view cell);

// Convenience: vocabulary over one file.
Vocabulary build_vocabulary_from_file(const std::string& path, const FieldSchema& schema,
                                      const DataFormat& format,
                                      std::size_t max_cardinality = kDefaultMaxCardinality);

// Encodes up to `max_rows` rows of a file (0 = all).
Dataset load_dataset(const std::string& path, const FieldSchema& schema, const Vocabulary& vocab,
                     const DataFormat& format, std::size_t max_rows = 0);

}  // namespace fieldctr

#endif  // FIELDCTR_DATA_H_

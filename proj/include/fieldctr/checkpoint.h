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

#ifndef FIELDCTR_CHECKPOINT_H_
#define FIELDCTR_CHECKPOINT_H_

#include <iosfwd>
#include <string>

#include "fieldctr/data.h"
#include "fieldctr/network.h"
#include "fieldctr/train.h"

namespace fieldctr {

inline constexpr int kCheckpointVersion = 1;

// Everything needed to resume training or score new data: the resolved
// schema (inside the model), vocabulary, input format, parameters and the
// optimizer state.
template <typename T>
struct Checkpoint {
  Model<T> model;
  Vocabulary vocab;
  DataFormat format;
  TrainState<T> state;
};

// Layout: a text header (magic/version, precision, input format, model
// options, counters, schema document) ended by an "end" line, then a
// little-endian binary body (vocabulary strings, parameter tensors,
// accumulator tensors in the same order).
template <typename T>
void write_checkpoint(std::ostream& out, const Model<T>& model, const Vocabulary& vocab,
                      const DataFormat& format, const TrainState<T>& state);

template <typename T>
Checkpoint<T> read_checkpoint(std::istream& in);

template <typename T>
void save_checkpoint(const std::string& path, const Model<T>& model, const Vocabulary& vocab,
                     const DataFormat& format, const TrainState<T>& state);

template <typename T>
Checkpoint<T> load_checkpoint(const std::string& path);

// "float" or "double", read from the header.
std::string checkpoint_precision(const std::string& path);

}  // namespace fieldctr

#endif  // FIELDCTR_CHECKPOINT_H_

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

#ifndef FIELDCTR_CONFIG_H_
#define FIELDCTR_CONFIG_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fieldctr/schema.h"

namespace fieldctr {

enum class Activation { kRelu, kIdentity };

// Which member of the model family a configuration encodes. FM, FwFM and
// the linear model are special cases of the full network with some parameter
// groups pinned.
enum class Variant { kFlen, kFm, kFwfm, kLinear };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);
std::string_view to_string(Activation a);
Activation parse_activation(std::string_view s);

struct DiceOptions {
  bool enabled = true;
  double beta = 0.7;
  // One mask per example instead of one per mini-batch.
  bool per_example = false;

  bool operator==(const DiceOptions&) const = default;
};

struct ModelOptions {
  Variant variant = Variant::kFlen;
  std::size_t embed_dim = 32;
  std::vector<std::size_t> mlp{64, 32};
  Activation fwbi_activation = Activation::kRelu;
  // Optional activation between w_F^T h_F and the sigmoid. kIdentity is the
  // default reading: z = w_F^T h_F feeds the sigmoid directly.
  Activation head_activation = Activation::kIdentity;
  DiceOptions dice;

  // Pinned parameter groups; pinned values are never updated.
  std::optional<double> fixed_diagonal;      // r[m][m]
  std::optional<double> fixed_off_diagonal;  // r[i][j], i < j
  bool identity_projection = false;          // W_FwBI = I
  bool sum_head = false;                     // w_F = 1, so z = sum(h_F)

  bool operator==(const ModelOptions&) const = default;
};

struct ModelSpec {
  FieldSchema schema;
  ModelOptions options;
};

}  // namespace fieldctr

#endif  // FIELDCTR_CONFIG_H_

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

#ifndef FIELDCTR_SYNTHETIC_H_
#define FIELDCTR_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace fieldctr {

// Generator for a small multi-field click log with a planted inter-field
// conjunction: the label is XOR(user_group < 5, item_cat < 5), flipped with
// probability `noise`. No single field carries marginal signal.
struct SyntheticOptions {
  std::size_t rows = 10'000;
  std::uint64_t seed = 7;
  double noise = 0.02;
};

// Schema document for the generated columns (label column "label").
std::string synthetic_schema_text();

// Header plus `rows` comma-delimited records.
void write_synthetic_csv(std::ostream& out, const SyntheticOptions& options);

}  // namespace fieldctr

#endif  // FIELDCTR_SYNTHETIC_H_

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

#include "fieldctr/dicefactor.h"

#include <string>

#include "fieldctr/errors.h"

namespace fieldctr {

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw BetaOutOfRange("keep probability must lie in [0, 1], got " + std::to_string(beta));
  }
}

DiceMask sample_mask(double beta, std::size_t dim, std::mt19937_64& rng) {
  check_beta(beta);
  DiceMask mask;
  mask.beta = beta;
  mask.keep.resize(dim);
  for (auto& p : mask.keep) p = unit_uniform(rng) < beta ? 1 : 0;
  return mask;
}

template <typename T>
std::vector<T> apply_train(std::span<const T> interaction, const DiceMask& mask) {
  if (interaction.size() != mask.keep.size()) {
    throw LengthMismatch("interaction length " + std::to_string(interaction.size()) +
                         " != mask length " + std::to_string(mask.keep.size()));
  }
  std::vector<T> out(interaction.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = mask.keep[k] ? interaction[k] : T(0);
  return out;
}

template <typename T>
std::vector<T> apply_inference(std::span<const T> interaction, double beta) {
  check_beta(beta);
  std::vector<T> out(interaction.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = interaction[k] * static_cast<T>(beta);
  return out;
}

DiceGate DiceGate::train(const DiceMask& mask) {
  std::vector<double> f(mask.keep.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = mask.keep[k] ? 1.0 : 0.0;
  return DiceGate(std::move(f));
}

DiceGate DiceGate::inference(double beta, std::size_t dim) {
  check_beta(beta);
  return DiceGate(std::vector<double>(dim, beta));
}

template std::vector<float> apply_train<float>(std::span<const float>, const DiceMask&);
template std::vector<double> apply_train<double>(std::span<const double>, const DiceMask&);
template std::vector<float> apply_inference<float>(std::span<const float>, double);
template std::vector<double> apply_inference<double>(std::span<const double>, double);

}  // namespace fieldctr

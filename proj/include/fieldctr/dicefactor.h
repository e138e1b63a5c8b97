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

#ifndef FIELDCTR_DICEFACTOR_H_
#define FIELDCTR_DICEFACTOR_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fieldctr {

// Keep-mask over the dim bilinear paths of the interaction vector. One mask
// is drawn per training iteration and shared by every pairwise path.
struct DiceMask {
  std::vector<std::uint8_t> keep;
  double beta = 1.0;

  bool operator==(const DiceMask&) const = default;
};

// Throws BetaOutOfRange unless 0 <= beta <= 1.
void check_beta(double beta);

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Independent Bernoulli(beta) entries.
DiceMask sample_mask(double beta, std::size_t dim, std::mt19937_64& rng);

// v (.) p. Throws LengthMismatch.
template <typename T>
std::vector<T> apply_train(std::span<const T> interaction, const DiceMask& mask);

// beta * v, the mean network used at inference.
template <typename T>
std::vector<T> apply_inference(std::span<const T> interaction, double beta);

// The per-dimension multiplier the interaction layer applies: the mask in
// training, beta at inference, 1 when DiceFactor is disabled.
class DiceGate {
 public:
  static DiceGate off(std::size_t dim) { return DiceGate(std::vector<double>(dim, 1.0)); }
  static DiceGate train(const DiceMask& mask);
  static DiceGate inference(double beta, std::size_t dim);

  std::size_t dim() const { return factors_.size(); }
  double factor(std::size_t k) const { return factors_[k]; }
  std::span<const double> factors() const { return factors_; }

 private:
  explicit DiceGate(std::vector<double> factors) : factors_(std::move(factors)) {}
  std::vector<double> factors_;
};

}  // namespace fieldctr

#endif  // FIELDCTR_DICEFACTOR_H_

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

#ifndef FIELDCTR_TESTS_TEST_UTIL_H_
#define FIELDCTR_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fieldctr/network.h"
#include "fieldctr/schema.h"

namespace fieldctr::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

// Resolved schema with `fields` feature fields spread over `hierarchies`
// (round robin, so every hierarchy is used when fields >= hierarchies).
inline FieldSchema random_schema(std::mt19937_64& rng, std::size_t fields,
                                 std::size_t hierarchies, bool multi_hot = true) {
  FieldSchema s;
  for (std::size_t m = 0; m < hierarchies; ++m) s.hierarchies.push_back("h" + std::to_string(m));
  for (std::size_t n = 0; n < fields; ++n) {
    FieldDef f;
    f.name = "f" + std::to_string(n);
    f.cardinality = 2 + rng() % 4;
    f.encoding = multi_hot && rng() % 3 == 0 ? Encoding::kMultiHot : Encoding::kOneHot;
    f.hierarchy = n % hierarchies;
    s.fields.push_back(f);
  }
  s.validate();
  return s;
}

inline Instance random_instance(const FieldSchema& schema, std::mt19937_64& rng) {
  Instance inst;
  inst.label = static_cast<float>(rng() % 2);
  for (const auto& f : schema.fields) {
    std::vector<std::uint32_t> actives;
    const std::size_t count = f.encoding == Encoding::kOneHot ? 1 : rng() % 4;
    for (std::size_t i = 0; i < count; ++i) {
      actives.push_back(static_cast<std::uint32_t>(rng() % *f.cardinality));
    }
    inst.push_field(actives);
  }
  return inst;
}

// Every parameter, pinned groups excluded, set uniformly in [-scale, scale].
template <typename T>
void randomize(Model<T>& model, std::mt19937_64& rng, double scale = 0.5) {
  const auto fill = [&](std::vector<T>& v) {
    for (auto& x : v) x = static_cast<T>(uniform(rng, -scale, scale));
  };
  for (std::size_t n = 0; n < model.embedding().field_count(); ++n) fill(model.embedding().matrix(n));
  model.fwbi().w0 = static_cast<T>(uniform(rng, -scale, scale));
  for (auto& w : model.fwbi().linear) fill(w);
  const std::size_t m = model.fwbi().r.fields();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      if (!model.r_pinned(i, j)) model.fwbi().r(i, j) = static_cast<T>(uniform(rng, 0.2, 1.5));
    }
  }
  if (!model.projection_pinned()) fill(model.fwbi().projection);
  for (auto& layer : model.mlp().layers) {
    fill(layer.weight);
    fill(layer.bias);
  }
  if (!model.head_pinned()) fill(model.head().w);
}

// Visits every trainable scalar with its analytic gradient from `grads`.
inline void for_each_trainable(
    Model<double>& model, const Gradients<double>& grads,
    const std::function<void(const std::string&, double&, double)>& fn) {
  const auto sparse = [](const SparseRowGradient<double>& g, std::uint32_t idx, std::size_t k) {
    const auto& t = g.touched();
    for (std::size_t s = 0; s < t.size(); ++s) {
      if (t[s] == idx) return g.row_at(s)[k];
    }
    return 0.0;
  };
  const std::size_t dim = model.dim();
  for (std::size_t n = 0; n < model.embedding().field_count(); ++n) {
    auto& v = model.embedding().matrix(n);
    for (std::size_t i = 0; i < v.size(); ++i) {
      fn("V" + std::to_string(n) + "[" + std::to_string(i) + "]", v[i],
         sparse(grads.embedding[n], static_cast<std::uint32_t>(i / dim), i % dim));
    }
  }
  fn("w0", model.fwbi().w0, grads.fwbi.w0);
  for (std::size_t n = 0; n < model.fwbi().linear.size(); ++n) {
    auto& w = model.fwbi().linear[n];
    for (std::size_t j = 0; j < w.size(); ++j) {
      fn("w" + std::to_string(n) + "[" + std::to_string(j) + "]", w[j],
         sparse(grads.fwbi.linear[n], static_cast<std::uint32_t>(j), 0));
    }
  }
  const std::size_t m = model.fwbi().r.fields();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      if (model.r_pinned(i, j)) continue;
      fn("r[" + std::to_string(i) + "][" + std::to_string(j) + "]", model.fwbi().r(i, j),
         grads.fwbi.r[model.fwbi().r.index(i, j)]);
    }
  }
  if (!model.projection_pinned()) {
    auto& p = model.fwbi().projection;
    for (std::size_t i = 0; i < p.size(); ++i) {
      fn("W_FwBI[" + std::to_string(i) + "]", p[i], grads.fwbi.projection[i]);
    }
  }
  for (std::size_t l = 0; l < model.mlp().layers.size(); ++l) {
    auto& layer = model.mlp().layers[l];
    for (std::size_t i = 0; i < layer.weight.size(); ++i) {
      fn("W" + std::to_string(l + 1) + "[" + std::to_string(i) + "]", layer.weight[i],
         grads.mlp[l].weight[i]);
    }
    for (std::size_t i = 0; i < layer.bias.size(); ++i) {
      fn("b" + std::to_string(l + 1) + "[" + std::to_string(i) + "]", layer.bias[i],
         grads.mlp[l].bias[i]);
    }
  }
  if (!model.head_pinned()) {
    auto& w = model.head().w;
    for (std::size_t i = 0; i < w.size(); ++i) {
      fn("w_F[" + std::to_string(i) + "]", w[i], grads.head[i]);
    }
  }
}

}  // namespace fieldctr::testing

#endif  // FIELDCTR_TESTS_TEST_UTIL_H_

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

#include "fieldctr/config.h"

#include <string>

#include "fieldctr/errors.h"

namespace fieldctr {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kFlen: return "flen";
    case Variant::kFm: return "fm";
    case Variant::kFwfm: return "fwfm";
    case Variant::kLinear: return "linear";
  }
  return "flen";
}

Variant parse_variant(std::string_view s) {
  if (s == "flen") return Variant::kFlen;
  if (s == "fm") return Variant::kFm;
  if (s == "fwfm") return Variant::kFwfm;
  if (s == "linear") return Variant::kLinear;
  throw Error("unknown model variant '" + std::string(s) + "'");
}

std::string_view to_string(Activation a) {
  return a == Activation::kRelu ? "relu" : "identity";
}

Activation parse_activation(std::string_view s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "identity" || s == "none") return Activation::kIdentity;
  throw Error("unknown activation '" + std::string(s) + "'");
}

}  // namespace fieldctr

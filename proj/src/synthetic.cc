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

#include "fieldctr/synthetic.h"

#include <ostream>
#include <random>

#include "fieldctr/dicefactor.h"

namespace fieldctr {

std::string synthetic_schema_text() {
  return "# Synthetic click log. Grouping: user / item / context.\n"
         "hierarchies: user, item, context\n"
         "user_id, auto, one-hot, user, dict\n"
         "user_group, auto, one-hot, user, dict\n"
         "item_id, auto, one-hot, item, dict\n"
         "item_cat, auto, one-hot, item, dict\n"
         "item_tags, auto, multi-hot, item, hash:64\n"
         "device, auto, one-hot, context, hash:16\n"
         "hour, auto, one-hot, context, dict\n";
}

void write_synthetic_csv(std::ostream& out, const SyntheticOptions& options) {
  std::mt19937_64 rng(options.seed);
  const auto pick = [&](std::uint64_t n) { return rng() % n; };
  out << "label,user_id,user_group,item_id,item_cat,item_tags,device,hour\n";
  for (std::size_t i = 0; i < options.rows; ++i) {
    const auto group = pick(10);
    const auto cat = pick(10);
    bool click = (group < 5) != (cat < 5);
    if (unit_uniform(rng) < options.noise) click = !click;
    out << (click ? 1 : 0) << ",u" << pick(200) << ",g" << group << ",i" << pick(200) << ",c"
        << cat << ',';
    const auto tags = pick(4);
    for (std::uint64_t t = 0; t < tags; ++t) out << (t ? "|" : "") << 't' << pick(50);
    out << ",d" << pick(12) << ",h" << pick(24) << '\n';
  }
}

}  // namespace fieldctr

// Copyright 2026 The Okypous Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "okypous/pmc.hpp"

#include <cmath>

#include "okypous/error.hpp"

namespace okypous {

bool PmcVector::same_shape(const PmcVector& other) const {
  return core.size() == other.core.size() && uncore.size() == other.uncore.size() &&
         dram.size() == other.dram.size();
}

void PmcVector::validate() const {
  for (const auto* domain : {&core, &uncore, &dram}) {
    for (double v : *domain) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw Error(ErrorKind::kConfig, "PMC counts must be finite and >= 0");
      }
    }
  }
}

PmcVector PmcVector::scaled(double factor) const {
  PmcVector out = *this;
  for (auto* domain : {&out.core, &out.uncore, &out.dram}) {
    for (double& v : *domain) v *= factor;
  }
  return out;
}

nlohmann::json to_json(const PmcVector& pmcs) {
  return {{"c", pmcs.core}, {"u", pmcs.uncore}, {"d", pmcs.dram}};
}

PmcVector pmcs_from_json(const nlohmann::json& j) {
  PmcVector p{j.at("c").get<std::vector<double>>(), j.at("u").get<std::vector<double>>(),
              j.at("d").get<std::vector<double>>()};
  p.validate();
  return p;
}

}  // namespace okypous

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

#include "okypous/error.hpp"

namespace okypous {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kStructural: return "structural";
    case ErrorKind::kOffGrid: return "off-grid";
    case ErrorKind::kNoHistory: return "no-history";
    case ErrorKind::kUntrained: return "untrained";
    case ErrorKind::kInfeasibleSlo: return "infeasible-SLO";
    case ErrorKind::kInsufficientCoverage: return "insufficient-coverage";
    case ErrorKind::kNonMonotoneFit: return "non-monotone-fit";
    case ErrorKind::kUndefinedShares: return "undefined-shares";
    case ErrorKind::kMissingBaseline: return "missing-baseline";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kParse: return "parse";
  }
  return "unknown";
}

}  // namespace okypous

// Copyright 2026 The Modality Engine Authors
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

#pragma once

#include <map>
#include <string>

#include "json.hpp"

namespace modality {

/// Outcome of one named numerical check.
struct Report {
  std::string check_name;
  bool pass = false;
  std::map<std::string, double> metrics;
  /// Free-form structured detail (pair listings, notes, ...). Null if unused.
  nlohmann::json details;
};

/// {check_name, pass, metrics{...}} plus "details" when present.
inline nlohmann::json report_to_json(const Report& r) {
  nlohmann::json out{{"check_name", r.check_name},
                     {"pass", r.pass},
                     {"metrics", nlohmann::json(r.metrics)}};
  if (!r.details.is_null()) out["details"] = r.details;
  return out;
}

}  // namespace modality

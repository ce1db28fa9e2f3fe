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

// Ready-made physical set-ups: sequential spin measurements along two
// directions, a balanced Mach-Zehnder interferometer, and a spin-singlet pair
// measured jointly or with separated analyzers.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "modality/contexts.hpp"

namespace modality {

using ParameterValue = std::variant<double, bool, std::string, Vec3>;

struct ScenarioSpec {
  std::string name;
  std::optional<Eigen::Index> dimension;
  std::map<std::string, ParameterValue> parameters;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
};

struct LabeledDistribution {
  std::string name;
  std::vector<std::string> outcomes;
  Eigen::VectorXd probabilities;
};

struct ScenarioReport {
  std::string scenario;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<LabeledDistribution> exact;
  std::vector<LabeledDistribution> empirical;
  std::map<std::string, double> metrics;
  bool pass = false;
  std::vector<std::string> notes;
};

/// Measures along u, then v, then u again, starting from the modality of the
/// u-context labelled `initial_label`. The first step must reproduce the
/// initial modality every time; the third must match the exact chain
/// distribution.
ScenarioReport scenario_sequential_spin(double j, const Vec3& u, const Vec3& v,
                                        double initial_label,
                                        std::uint64_t trials, std::uint64_t seed);

/// Two-mode interferometer with symmetric 50/50 splitters (amplitude i on
/// reflection) and a phase `phase` on the second arm. Output port A is the
/// port that receives the photon with certainty at zero phase. Statistics
/// are produced both without and with a path measurement between the
/// splitters; `measure_inside` selects which arrangement the headline
/// metrics describe.
ScenarioReport scenario_mach_zehnder(double phase, bool measure_inside,
                                     std::uint64_t trials, std::uint64_t seed);

/// Spin-singlet pair. Joint context: the three triplet projectors plus the
/// singlet. Separated context: products of spin-1/2 eigenbases along a and b.
ScenarioReport scenario_singlet(const Vec3& a, const Vec3& b,
                                std::uint64_t trials, std::uint64_t seed);

struct ChshDirections {
  Vec3 a, a_prime, b, b_prime;
};

/// Coplanar directions at which the singlet reaches S = 2 sqrt(2) with
/// S = E(a,b) - E(a,b') + E(a',b) + E(a',b').
ChshDirections optimal_chsh_directions();

/// Runs the singlet at the four direction pairs and combines the
/// correlations into S.
ScenarioReport scenario_chsh(const ChshDirections& d, std::uint64_t trials,
                             std::uint64_t seed);

/// Two-qubit objects used by the singlet scenario.
RankOneProjector singlet_projector();
Context bell_context();
Context separated_context(const Vec3& a, const Vec3& b);
/// E = sum_k s_k t_k p_k over the separated-context outcomes.
double correlation(const Eigen::VectorXd& separated_distribution);

std::vector<std::string> available_scenarios();

/// Dispatches on spec.name. Throws UnknownScenario (listing the available
/// names) or MissingParameter.
ScenarioReport load_scenario(const ScenarioSpec& spec);

/// {"name", "dimension"?, "parameters": {...}, "trials"?, "seed"?}
ScenarioSpec scenario_spec_from_json(const nlohmann::json& j);
/// Strings such as "0,0,1" become 3-vectors, "true"/"false" booleans, and
/// anything that parses as a number (including "1/2") a number.
ParameterValue parse_parameter_text(const std::string& text);

/// {scenario, trials, seed, exact, empirical, metrics, pass, notes}
nlohmann::json scenario_report_to_json(const ScenarioReport& r);

}  // namespace modality

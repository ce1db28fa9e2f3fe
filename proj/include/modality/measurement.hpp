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

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "modality/contexts.hpp"
#include "modality/probability.hpp"
#include "modality/random.hpp"
#include "modality/report.hpp"

namespace modality {

/// Born probabilities below this are treated as exact zeros when sampling.
inline constexpr double sampling_zero = 1e-15;
/// Significance level of the chi-square goodness-of-fit test.
inline constexpr double fit_significance = 0.001;

/// Either a modality (its rank-one projector) or a mixed state such as an
/// unpolarized source.
class SystemState {
 public:
  static SystemState modal(RankOneProjector p) { return SystemState(std::move(p)); }
  static SystemState mixed(DensityMatrix rho) { return SystemState(std::move(rho)); }

  Eigen::Index dim() const;
  bool is_modal() const { return std::holds_alternative<RankOneProjector>(kind_); }
  /// Throws InvalidArgument for a mixed state.
  const RankOneProjector& projector() const;
  /// Throws InvalidArgument for a modal state.
  const DensityMatrix& density() const;

  /// Born distribution over the modalities of `c`.
  Eigen::VectorXd distribution(const Context& c) const;

 private:
  explicit SystemState(RankOneProjector p) : kind_(std::move(p)) {}
  explicit SystemState(DensityMatrix rho) : kind_(std::move(rho)) {}
  std::variant<RankOneProjector, DensityMatrix> kind_;
};

struct MeasurementRecord {
  int step = 0;
  std::string context_id;
  Eigen::Index modality_index = 0;
  double label = 0.0;
  double probability_assigned = 0.0;

  bool operator==(const MeasurementRecord&) const = default;
};

struct MeasurementOutcome {
  Modality modality;
  SystemState state;
  MeasurementRecord record;
};

/// Samples one modality of `context` with its Born probability and replaces
/// the state by that modality's projector. A modal state whose projector is
/// already in the context (within tol_extra) yields that modality with
/// probability 1 and is returned unchanged. Always consumes one draw.
MeasurementOutcome measure(const SystemState& state, const Context& context,
                           RandomStream& rng);

/// Measures each context in order, threading the post-measurement state.
/// Record context ids are the context names, or "C<position>" when unnamed.
std::vector<MeasurementRecord> run_sequence(const SystemState& initial,
                                            const std::vector<Context>& contexts,
                                            RandomStream& rng);

using RecordBatch = std::vector<std::vector<MeasurementRecord>>;

/// `trials` independent sequences; run r draws from RandomStream(seed, r).
RecordBatch run_batch(const SystemState& initial,
                      const std::vector<Context>& contexts, std::uint64_t seed,
                      std::uint64_t trials);

/// Exact distribution at every step of a measurement chain: the Born
/// distribution of the initial state, then successive products with the
/// transition matrices between consecutive contexts.
std::vector<Eigen::VectorXd> exact_step_distributions(
    const SystemState& initial, const std::vector<Context>& contexts);

/// Outcome counts at one step. Frequencies are counts / total.
struct EmpiricalDistribution {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  Eigen::VectorXd frequencies() const;
};

/// Counts of modality indices among the records with the given step. Throws
/// InvalidArgument when no record matches.
EmpiricalDistribution empirical_distribution(std::span<const MeasurementRecord> records,
                                             int step, Eigen::Index dim);
EmpiricalDistribution empirical_distribution(const RecordBatch& batch, int step,
                                             Eigen::Index dim);

/// Half the L1 distance.
double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// Upper critical value of the chi-square distribution.
double chi_square_critical(int degrees_of_freedom,
                           double significance = fit_significance);

/// Total-variation distance and Pearson chi-square test of observed
/// frequencies against exact probabilities. Categories with zero exact
/// probability do not count towards the degrees of freedom; any observation
/// in one fails the test outright.
Report goodness_of_fit(const Eigen::VectorXd& empirical, const Eigen::VectorXd& exact,
                       std::uint64_t num_trials);

nlohmann::json record_to_json(const MeasurementRecord& r);
/// One record per line, runs in order.
std::string records_to_jsonl(const RecordBatch& batch);
/// Header: step,context_id,index,label,probability_assigned
std::string records_to_csv(const RecordBatch& batch);

}  // namespace modality

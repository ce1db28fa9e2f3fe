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

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "modality/contexts.hpp"
#include "modality/linalg.hpp"
#include "modality/report.hpp"

namespace modality {

/// Values this far outside [0, 1] are rounding and get clamped; anything
/// farther is a NumericalInconsistency.
inline constexpr double probability_clamp_window = 1e-12;
/// Transition probability below which two modalities are mutually exclusive.
inline constexpr double exclusive_threshold = 1e-9;
/// Transition probability above which two modalities are linked with
/// certainty.
inline constexpr double certain_threshold = 1.0 - 1e-9;

/// Hermitian, unit-trace, positive semidefinite (eigenvalues >= -1e-10).
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix pure(const RankOneProjector& p);
  static DensityMatrix maximally_mixed(Eigen::Index n);

  Eigen::Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

/// Full-rank mixed state U diag(w) U^dagger with Haar U and weights drawn
/// uniformly from the probability simplex. Deterministic in (dim, seed).
DensityMatrix random_density_matrix(Eigen::Index dim, std::uint64_t seed);

/// Clamps rounding dust into [0, 1]; throws NumericalInconsistency beyond the
/// clamp window.
double clamp_probability(double p);

/// tr(rho P).
double born_probability(const DensityMatrix& rho, const RankOneProjector& p);
/// tr(Q P) = |<q|p>|^2.
double pure_born_probability(const RankOneProjector& q,
                             const RankOneProjector& p);
/// Born probabilities of every modality of `c`.
Eigen::VectorXd born_distribution(const DensityMatrix& rho, const Context& c);
Eigen::VectorXd born_distribution(const RankOneProjector& q, const Context& c);

/// Doubly stochastic matrix of probabilities between two contexts: entry
/// (i, j) is the probability of target modality j given source modality i.
class TransitionMatrix {
 public:
  Eigen::Index dim() const { return entries_.rows(); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
  const Context& source() const { return source_; }
  const Context& target() const { return target_; }
  /// Unitary carrying the source basis onto the target basis.
  const UnitaryMatrix& connecting_unitary() const { return connecting_; }
  /// max_ij | T_ij - |<a_i| U |a_j>|^2 |, the unistochastic certificate.
  double unistochastic_error() const { return unistochastic_error_; }
  double max_row_sum_error() const;
  double max_column_sum_error() const;

 private:
  friend TransitionMatrix transition_matrix(const Context&, const Context&);
  TransitionMatrix(Eigen::MatrixXd entries, Context source, Context target,
                   UnitaryMatrix connecting, double err)
      : entries_(std::move(entries)),
        source_(std::move(source)),
        target_(std::move(target)),
        connecting_(std::move(connecting)),
        unistochastic_error_(err) {}

  Eigen::MatrixXd entries_;
  Context source_;
  Context target_;
  UnitaryMatrix connecting_;
  double unistochastic_error_;
};

/// Builds T_ij = tr(P_i Q_j) and certifies T_ij = |<a_i| U |a_j>|^2 within
/// 1e-10 for U = unitary_between_contexts(initial, final).
TransitionMatrix transition_matrix(const Context& initial, const Context& final);

/// N rows, N columns, header row of target labels.
std::string transition_matrix_to_csv(const TransitionMatrix& t);
/// {source_labels, target_labels, entries}.
nlohmann::json transition_matrix_to_json(const TransitionMatrix& t);

/// Born distribution of the state over each context in turn. A state vector
/// alone yields one distribution per context, not a single sample space.
std::vector<Eigen::VectorXd> distributions_for_state(
    const ExtravalenceClass& psi, const std::vector<Context>& contexts);

/// Probability assignment on rank-one projectors.
class FrameFunction {
 public:
  using Evaluator = std::function<double(const RankOneProjector&)>;

  FrameFunction(Eigen::Index dim, Evaluator f) : dim_(dim), f_(std::move(f)) {}

  Eigen::Index dim() const { return dim_; }
  double operator()(const RankOneProjector& p) const;
  /// |sum_i f(P_i) - 1| over the context.
  double completeness_residual(const Context& c) const;

 private:
  Eigen::Index dim_;
  Evaluator f_;
};

/// P -> tr(rho P).
FrameFunction frame_function_from_density(DensityMatrix rho);

/// Classifies every cross-context modality pair as exclusive, certain or
/// probabilistic, and finds the largest set of pairwise-exclusive modalities
/// (a maximum clique of the exclusivity graph). Passes when that set has at
/// most N members.
Report check_no_super_context(const std::vector<Context>& contexts);

}  // namespace modality

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

// Numerical witnesses for the structural results behind the probability
// layer: unitary maps between contexts, continuous paths from the identity to
// a permutation, density-matrix recovery from a frame function, and a qubit
// frame function that no density matrix reproduces.

#include <cstdint>
#include <utility>
#include <vector>

#include "modality/contexts.hpp"
#include "modality/linalg.hpp"
#include "modality/report.hpp"

namespace modality {

/// U = sum_k |b_k><a_k| on the phase-fixed vectors; maps a's k-th vector to
/// b's k-th vector.
UnitaryMatrix unitary_between_contexts(const Context& a, const Context& b);

/// Checks that u maps a's projectors onto b's (within tol_extra; throws
/// InvalidArgument otherwise), then reports the largest overlap
/// |tr(U P_i U^dagger U P_j U^dagger)| between images of distinct projectors.
Report orthogonality_preservation_check(const Context& a, const Context& b,
                                        const UnitaryMatrix& u);

/// A permutation of {0, ..., N-1}; element i is sent to image(i).
class Permutation {
 public:
  explicit Permutation(std::vector<int> images);
  static Permutation identity(int n);
  /// Swaps i and j.
  static Permutation transposition(int n, int i, int j);

  int size() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& images() const { return images_; }
  /// +1 for even permutations, -1 for odd, from the cycle structure.
  int sign() const;
  /// Real matrix with M e_i = e_{image(i)}.
  Eigen::MatrixXd matrix() const;

 private:
  std::vector<int> images_;
};

/// Every permutation of n elements in lexicographic order.
std::vector<Permutation> all_permutations(int n);

/// P^t along the spectral path; t must lie in [0, 1].
UnitaryMatrix permutation_path(const Permutation& perm, double t);

/// Determinant and parity of the permutation matrix, and the unitarity and
/// endpoint errors of the complex path over a grid of `grid_points` values of
/// t. Odd permutations have determinant -1 and so have no path inside SO(N);
/// the complex path exists for all of them.
Report real_obstruction_witness(const Permutation& perm, int grid_points = 101);

/// A sampled frame-function value.
struct ProjectorSample {
  RankOneProjector projector;
  double probability;
};

struct GleasonFitResult {
  /// Hermitian, trace one; positivity is not enforced.
  ComplexMatrix rho_hat;
  /// Root-mean-square misfit over the samples.
  double residual = 0.0;
  /// max(0, -smallest eigenvalue of rho_hat).
  double psd_violation = 0.0;
  /// Condition number of the design operator.
  double condition_number = 0.0;
};

/// Largest design-operator condition number gleason_fit accepts.
inline constexpr double gleason_max_condition = 1e6;

/// Least-squares fit of a trace-one Hermitian rho to tr(rho P) = p, with rho
/// written as I/N plus a combination of an orthonormal traceless Hermitian
/// basis. Solved from the normal equations. Throws RankDeficient when fewer
/// than N^2 samples are supplied or the design is ill-conditioned.
GleasonFitResult gleason_fit(const std::vector<ProjectorSample>& samples,
                             Eigen::Index dim);

/// Orthonormal (Hilbert-Schmidt) basis of traceless Hermitian N x N matrices.
std::vector<ComplexMatrix> traceless_hermitian_basis(Eigen::Index dim);

/// Bloch vector of a qubit projector.
Vec3 bloch_vector(const RankOneProjector& p);

/// f(n) = (1 + n_z^k)/2 on the Bloch sphere, k odd. Every antipodal pair sums
/// to one, but f is not of the form tr(rho P) for k >= 3.
class QubitFrameCounterexample {
 public:
  explicit QubitFrameCounterexample(int exponent = 3);

  int exponent() const { return exponent_; }
  double operator()(const Vec3& bloch) const;
  double operator()(const RankOneProjector& p) const;

 private:
  int exponent_;
};

/// max over n_z in [-1, 1] of |(n_z^k - n_z)/2|, by dense scan.
double counterexample_max_deviation(const QubitFrameCounterexample& c,
                                    int scan_points = 200001);

/// Evaluates the counterexample on `num_contexts` Haar-random qubit contexts:
/// antipodal completeness, gleason_fit residual and psd violation, and the
/// maximal deviation from the linear frame function (1 + n_z)/2. Passes when
/// completeness holds to 1e-15 and the fit residual exceeds 0.05.
Report counterexample_report(const QubitFrameCounterexample& c,
                             int num_contexts, std::uint64_t seed);

}  // namespace modality

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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "modality/linalg.hpp"

namespace modality {

/// Projector comparison tolerance for objects computed independently.
inline constexpr double tol_extra = 1e-9;
/// Smallest eigenvalue gap accepted when building a context from an
/// observable.
inline constexpr double default_degeneracy_gap = 1e-8;

using Vec3 = Eigen::Vector3d;

/// A measurement arrangement: N mutually orthogonal rank-one projectors that
/// sum to the identity, each carrying an outcome label.
///
/// Contexts are immutable and cheap to copy (the data is shared).
class Context {
 public:
  /// Validates orthogonality and completeness within tol_unitary. Vectors are
  /// phase-fixed; they must have unit norm.
  static Context from_vectors(const std::vector<ComplexVector>& vectors,
                              std::vector<double> labels,
                              std::string name = {});

  Eigen::Index dim() const { return static_cast<Eigen::Index>(d_->projectors.size()); }
  const std::vector<RankOneProjector>& projectors() const { return d_->projectors; }
  const RankOneProjector& projector(Eigen::Index i) const;
  const std::vector<double>& labels() const { return d_->labels; }
  double label(Eigen::Index i) const;
  const std::string& name() const { return d_->name; }

  /// Matrix whose k-th column is the k-th phase-fixed vector; always unitary.
  UnitaryMatrix basis() const;

  /// Same projectors and labels under a new name.
  Context with_name(std::string name) const;

  /// max_{i != j} |tr(P_i P_j)|.
  double orthogonality_error() const;
  /// ||sum_i P_i - I||_F.
  double completeness_error() const;

 private:
  struct Data {
    std::vector<RankOneProjector> projectors;
    std::vector<double> labels;
    std::string name;
  };
  explicit Context(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

/// Same ordering, same labels, projectors equal within `tol`.
bool approx_equal(const Context& a, const Context& b, double tol = tol_extra);

/// One outcome of a context.
class Modality {
 public:
  Modality(Context context, Eigen::Index index);

  const Context& context() const { return context_; }
  Eigen::Index index() const { return index_; }
  double label() const { return context_.label(index_); }
  const RankOneProjector& projector() const {
    return context_.projector(index_);
  }

 private:
  Context context_;
  Eigen::Index index_;
};

/// The class of all modalities linked with certainty, represented by one
/// phase-fixed rank-one projector.
class ExtravalenceClass {
 public:
  explicit ExtravalenceClass(RankOneProjector representative)
      : rep_(std::move(representative)) {}

  Eigen::Index dim() const { return rep_.dim(); }
  const RankOneProjector& representative() const { return rep_; }

 private:
  RankOneProjector rep_;
};

bool same_class(const ExtravalenceClass& a, const ExtravalenceClass& b,
                double tol = tol_extra);

/// Projector k is built from column k of `u`. Default labels are 0..N-1.
Context context_from_unitary(const UnitaryMatrix& u,
                             std::optional<std::vector<double>> labels = {});

/// Eigenprojectors of `a`, labelled by eigenvalue, in descending order.
/// Throws DegenerateObservable when two eigenvalues are closer than
/// `degeneracy_gap`.
Context context_from_observable(const HermitianObservable& a,
                                double degeneracy_gap = default_degeneracy_gap);

struct SpinOperators {
  HermitianObservable jx;
  HermitianObservable jy;
  HermitianObservable jz;
};

/// Angular-momentum matrices for spin j in the basis m = j, j-1, ..., -j.
/// 2j must be a non-negative integer and 2j+1 <= max_dim.
SpinOperators spin_operators(double j);

/// Eigenbasis of n.J for the unit vector along `direction`, labelled
/// m = j, ..., -j.
Context spin_context(double j, const Vec3& direction);

/// True iff the two modalities carry the same projector within tol_extra.
bool extravalent(const Modality& m1, const Modality& m2);

ExtravalenceClass extravalence_class_of(const Modality& m);

/// {dim, labels, vectors: [[[re, im], ...], ...]} in phase-fixed form; adds
/// "name" when the context has one.
nlohmann::json context_to_json(const Context& c);
/// Accepts the form written by context_to_json (vectors are normalized on
/// load) and the shorthand {"spin": j, "direction": [x, y, z]}, where j may be
/// a number or a string such as "3/2".
Context context_from_json(const nlohmann::json& j);

/// Parses "1/2", "2", "1.5" and similar spellings of a spin quantum number.
double parse_spin(const std::string& text);

}  // namespace modality

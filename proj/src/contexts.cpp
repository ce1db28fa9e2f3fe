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

#include "modality/contexts.hpp"

#include <charconv>
#include <cmath>

namespace modality {

Context Context::from_vectors(const std::vector<ComplexVector>& vectors,
                              std::vector<double> labels, std::string name) {
  const auto n = static_cast<Eigen::Index>(vectors.size());
  detail::check_dim(n, "context");
  if (labels.size() != vectors.size()) {
    throw InvalidArgument("context: " + std::to_string(labels.size()) +
                          " labels for " + std::to_string(vectors.size()) +
                          " projectors");
  }
  for (double l : labels) {
    if (!std::isfinite(l)) throw InvalidArgument("context: non-finite label");
  }
  auto data = std::make_shared<Data>();
  data->projectors.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (v.size() != n) {
      throw DimensionMismatch("context: vector of length " +
                              std::to_string(v.size()) + " in dimension " +
                              std::to_string(n));
    }
    data->projectors.emplace_back(v);
  }
  data->labels = std::move(labels);
  data->name = std::move(name);
  Context c(std::move(data));
  const double ortho = c.orthogonality_error();
  if (!(ortho < tol_unitary)) {
    throw InvalidArgument("context: projectors not orthogonal (max |tr(PiPj)| = " +
                          std::to_string(ortho) + ")");
  }
  const double complete = c.completeness_error();
  if (!(complete < tol_unitary)) {
    throw InvalidArgument("context: projectors do not sum to identity (" +
                          std::to_string(complete) + ")");
  }
  return c;
}

const RankOneProjector& Context::projector(Eigen::Index i) const {
  if (i < 0 || i >= dim()) {
    throw InvalidArgument("context: index " + std::to_string(i) +
                          " out of range");
  }
  return d_->projectors[static_cast<std::size_t>(i)];
}

double Context::label(Eigen::Index i) const {
  if (i < 0 || i >= dim()) {
    throw InvalidArgument("context: index " + std::to_string(i) +
                          " out of range");
  }
  return d_->labels[static_cast<std::size_t>(i)];
}

UnitaryMatrix Context::basis() const {
  ComplexMatrix m(dim(), dim());
  for (Eigen::Index k = 0; k < dim(); ++k) m.col(k) = projector(k).vector();
  return UnitaryMatrix(std::move(m));
}

Context Context::with_name(std::string name) const {
  auto data = std::make_shared<Data>(*d_);
  data->name = std::move(name);
  return Context(std::move(data));
}

double Context::orthogonality_error() const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    for (Eigen::Index j = i + 1; j < dim(); ++j) {
      worst = std::max(worst, std::norm(projector(i).vector().dot(
                                  projector(j).vector())));
    }
  }
  return worst;
}

double Context::completeness_error() const {
  ComplexMatrix sum = ComplexMatrix::Zero(dim(), dim());
  for (const auto& p : projectors()) sum += p.matrix();
  return (sum - ComplexMatrix::Identity(dim(), dim())).norm();
}

bool approx_equal(const Context& a, const Context& b, double tol) {
  if (a.dim() != b.dim() || a.labels() != b.labels()) return false;
  for (Eigen::Index k = 0; k < a.dim(); ++k) {
    if (!((a.projector(k).matrix() - b.projector(k).matrix()).norm() < tol)) {
      return false;
    }
  }
  return true;
}

Modality::Modality(Context context, Eigen::Index index)
    : context_(std::move(context)), index_(index) {
  if (index_ < 0 || index_ >= context_.dim()) {
    throw InvalidArgument("modality index " + std::to_string(index_) +
                          " outside [0, " + std::to_string(context_.dim()) +
                          ")");
  }
}

bool same_class(const ExtravalenceClass& a, const ExtravalenceClass& b,
                double tol) {
  if (a.dim() != b.dim()) return false;
  return (a.representative().matrix() - b.representative().matrix()).norm() <
         tol;
}

Context context_from_unitary(const UnitaryMatrix& u,
                             std::optional<std::vector<double>> labels) {
  const Eigen::Index n = u.dim();
  std::vector<double> l;
  if (labels) {
    if (static_cast<Eigen::Index>(labels->size()) != n) {
      throw InvalidArgument("context_from_unitary: expected " +
                            std::to_string(n) + " labels, got " +
                            std::to_string(labels->size()));
    }
    l = std::move(*labels);
  } else {
    for (Eigen::Index k = 0; k < n; ++k) l.push_back(static_cast<double>(k));
  }
  std::vector<ComplexVector> vecs;
  for (Eigen::Index k = 0; k < n; ++k) vecs.emplace_back(u.matrix().col(k));
  return Context::from_vectors(vecs, std::move(l));
}

Context context_from_observable(const HermitianObservable& a,
                                double degeneracy_gap) {
  const auto eig = hermitian_eigendecomposition(a);
  for (std::size_t k = 1; k < eig.eigenvalues.size(); ++k) {
    const double gap = eig.eigenvalues[k - 1] - eig.eigenvalues[k];
    if (gap < degeneracy_gap) {
      throw DegenerateObservable(
          "observable has eigenvalue gap " + std::to_string(gap) +
          " below " + std::to_string(degeneracy_gap) +
          "; its eigenprojectors are not all rank one");
    }
  }
  return context_from_unitary(eig.eigenvectors, eig.eigenvalues);
}

namespace {

void check_spin(double j) {
  const double twice = 2.0 * j;
  if (!std::isfinite(j) || j < 0.0 || std::abs(twice - std::round(twice)) > 1e-12) {
    throw InvalidArgument("spin must be a non-negative half-integer, got " +
                          std::to_string(j));
  }
  if (std::round(twice) + 1.0 > static_cast<double>(max_dim)) {
    throw InvalidArgument("spin " + std::to_string(j) +
                          " exceeds the dimension cap");
  }
}

}  // namespace

SpinOperators spin_operators(double j) {
  check_spin(j);
  const auto n = static_cast<Eigen::Index>(std::lround(2.0 * j)) + 1;
  ComplexMatrix jz = ComplexMatrix::Zero(n, n);
  ComplexMatrix jp = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double m = j - static_cast<double>(k);
    jz(k, k) = m;
    // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits at index k-1.
    if (k > 0) jp(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const ComplexMatrix jm = jp.adjoint();
  const std::complex<double> i2(0.0, 2.0);
  return {HermitianObservable((jp + jm) / 2.0),
          HermitianObservable((jp - jm) / i2), HermitianObservable(jz)};
}

Context spin_context(double j, const Vec3& direction) {
  check_spin(j);
  const double norm = direction.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument("spin_context: direction must be a nonzero vector");
  }
  const Vec3 n = direction / norm;
  const auto ops = spin_operators(j);
  const HermitianObservable projected(n.x() * ops.jx.matrix() +
                                      n.y() * ops.jy.matrix() +
                                      n.z() * ops.jz.matrix());
  const auto eig = hermitian_eigendecomposition(projected);
  std::vector<double> labels;
  for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
    const double m = j - static_cast<double>(k);
    if (std::abs(eig.eigenvalues[k] - m) > 1e-8) {
      throw NumericalInconsistency("spin_context: eigenvalue " +
                                   std::to_string(eig.eigenvalues[k]) +
                                   " does not match m = " + std::to_string(m));
    }
    labels.push_back(m);
  }
  return context_from_unitary(eig.eigenvectors, std::move(labels));
}

bool extravalent(const Modality& m1, const Modality& m2) {
  if (m1.context().dim() != m2.context().dim()) {
    throw DimensionMismatch("extravalent: modalities of dimension " +
                            std::to_string(m1.context().dim()) + " and " +
                            std::to_string(m2.context().dim()));
  }
  return (m1.projector().matrix() - m2.projector().matrix()).norm() <
         tol_extra;
}

ExtravalenceClass extravalence_class_of(const Modality& m) {
  return ExtravalenceClass(m.projector());
}

nlohmann::json context_to_json(const Context& c) {
  nlohmann::json vectors = nlohmann::json::array();
  for (const auto& p : c.projectors()) {
    nlohmann::json v = nlohmann::json::array();
    for (Eigen::Index i = 0; i < p.dim(); ++i) {
      v.push_back({p.vector()(i).real(), p.vector()(i).imag()});
    }
    vectors.push_back(std::move(v));
  }
  nlohmann::json out{{"dim", c.dim()}, {"labels", c.labels()}, {"vectors", vectors}};
  if (!c.name().empty()) out["name"] = c.name();
  return out;
}

namespace {

double spin_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_spin(j.get<std::string>());
  throw ParseError("spin: expected a number or a string such as \"1/2\"");
}

Vec3 vec3_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError(field + ": expected an array of three numbers");
  }
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    if (!j[static_cast<std::size_t>(k)].is_number()) {
      throw ParseError(field + "[" + std::to_string(k) + "]: expected a number");
    }
    v(k) = j[static_cast<std::size_t>(k)].get<double>();
  }
  return v;
}

}  // namespace

Context context_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("context: expected an object");
  const std::string name = j.contains("name") && j["name"].is_string()
                               ? j["name"].get<std::string>()
                               : std::string{};
  if (j.contains("spin")) {
    if (!j.contains("direction")) {
      throw ParseError("context.direction: required with \"spin\"");
    }
    return spin_context(spin_from_json(j["spin"]),
                        vec3_from_json(j["direction"], "context.direction"))
        .with_name(name);
  }
  if (!j.contains("vectors") || !j["vectors"].is_array()) {
    throw ParseError("context.vectors: expected an array of vectors");
  }
  std::vector<ComplexVector> vecs;
  const auto& jv = j["vectors"];
  for (std::size_t k = 0; k < jv.size(); ++k) {
    const std::string field = "context.vectors[" + std::to_string(k) + "]";
    if (!jv[k].is_array()) throw ParseError(field + ": expected an array");
    ComplexVector v(static_cast<Eigen::Index>(jv[k].size()));
    for (std::size_t i = 0; i < jv[k].size(); ++i) {
      const auto& z = jv[k][i];
      const std::string zf = field + "[" + std::to_string(i) + "]";
      if (z.is_number()) {
        v(static_cast<Eigen::Index>(i)) = z.get<double>();
      } else if (z.is_array() && z.size() == 2 && z[0].is_number() &&
                 z[1].is_number()) {
        v(static_cast<Eigen::Index>(i)) = {z[0].get<double>(), z[1].get<double>()};
      } else {
        throw ParseError(zf + ": expected [re, im] or a real number");
      }
    }
    const double norm = v.norm();
    if (!(norm > 0.0)) throw ParseError(field + ": zero vector");
    vecs.emplace_back(v / norm);
  }
  std::vector<double> labels;
  if (j.contains("labels")) {
    if (!j["labels"].is_array()) throw ParseError("context.labels: expected an array");
    for (const auto& l : j["labels"]) {
      if (!l.is_number()) throw ParseError("context.labels: expected numbers");
      labels.push_back(l.get<double>());
    }
  } else {
    for (std::size_t k = 0; k < vecs.size(); ++k) labels.push_back(static_cast<double>(k));
  }
  if (j.contains("dim") &&
      (!j["dim"].is_number_integer() || j["dim"].get<std::size_t>() != vecs.size())) {
    throw ParseError("context.dim: does not match the number of vectors");
  }
  return Context::from_vectors(vecs, std::move(labels), name);
}

double parse_spin(const std::string& text) {
  auto parse_number = [&](std::string_view s) {
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw InvalidArgument("cannot parse spin '" + text + "'");
    }
    return value;
  };
  const std::string_view s(text);
  const auto slash = s.find('/');
  double value = 0.0;
  if (slash == std::string_view::npos) {
    value = parse_number(s);
  } else {
    const double den = parse_number(s.substr(slash + 1));
    if (den == 0.0) throw InvalidArgument("cannot parse spin '" + text + "'");
    value = parse_number(s.substr(0, slash)) / den;
  }
  check_spin(value);
  return value;
}

}  // namespace modality

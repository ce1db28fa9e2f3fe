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

// Dense complex linear algebra used throughout the engine. Everything here is
// templated on the real scalar type; the rest of the library works with the
// double-precision aliases at the bottom of the file.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>
#include <vector>

#include "modality/errors.hpp"
#include "modality/random.hpp"

namespace modality {

/// Frobenius tolerance for structural checks (unitarity, idempotence, ...).
inline constexpr double tol_unitary = 1e-10;
/// Components with modulus at or below this are skipped when fixing phases.
inline constexpr double tol_phase = 1e-12;
/// Largest Hilbert-space dimension accepted by any constructor.
inline constexpr Eigen::Index max_dim = 64;

template <typename Real>
using MatrixC = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using VectorC = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

namespace detail {

inline void check_dim(Eigen::Index n, const char* what) {
  if (n < 1 || n > max_dim) {
    throw InvalidArgument(std::string(what) + ": dimension " +
                          std::to_string(n) + " outside [1, " +
                          std::to_string(max_dim) + "]");
  }
}

template <typename Derived>
void check_finite(const Eigen::MatrixBase<Derived>& a, const char* what) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const auto z = a(i, j);
      if (!std::isfinite(std::real(z)) || !std::isfinite(std::imag(z))) {
        throw InvalidArgument(std::string(what) + ": non-finite entry");
      }
    }
  }
}

}  // namespace detail

/// Standard matrix product; throws DimensionMismatch for incompatible shapes.
template <typename DerivedA, typename DerivedB>
auto multiply(const Eigen::MatrixBase<DerivedA>& a,
              const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("multiply: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " times " +
                            std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
  return (a * b).eval();
}

/// Conjugate transpose.
template <typename Derived>
auto dagger(const Eigen::MatrixBase<Derived>& a) {
  return a.adjoint().eval();
}

/// Kronecker product a (x) b.
template <typename DerivedA, typename DerivedB>
auto tensor_product(const Eigen::MatrixBase<DerivedA>& a,
                    const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::kroneckerProduct(a.derived(), b.derived());
  return out;
}

/// ||A^dagger A - I||_F.
template <typename Derived>
double unitarity_error(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  const Plain gram = a.adjoint() * a;
  return static_cast<double>(
      (gram - Plain::Identity(a.rows(), a.cols())).norm());
}

/// ||A - A^dagger||_F.
template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return static_cast<double>((a - a.adjoint()).norm());
}

/// Multiplies `v` by a unit phase so that its first component with modulus
/// above tol_phase is real and positive.
template <typename Real>
VectorC<Real> phase_fixed(VectorC<Real> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const Real mag = std::abs(v(i));
    if (mag > Real(tol_phase)) {
      v *= std::conj(v(i)) / mag;
      v(i) = std::complex<Real>(std::abs(v(i)), Real(0));
      break;
    }
  }
  return v;
}

/// Lexicographic comparison of complex vectors by (real, imag) per entry.
template <typename Real>
bool lexicographic_less(const VectorC<Real>& a, const VectorC<Real>& b) {
  for (Eigen::Index i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return a.size() < b.size();
}

/// Square matrix with U^dagger U = I within tol_unitary.
template <typename Real>
class BasicUnitary {
 public:
  using Matrix = MatrixC<Real>;

  explicit BasicUnitary(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
      throw NotUnitary("unitary matrix must be square");
    }
    detail::check_dim(m_.rows(), "unitary");
    detail::check_finite(m_, "unitary");
    const double err = unitarity_error(m_);
    if (!(err < tol_unitary)) {
      throw NotUnitary("matrix is not unitary: ||U^dagger U - I||_F = " +
                       std::to_string(err));
    }
  }

  static BasicUnitary identity(Eigen::Index n) {
    return BasicUnitary(Matrix::Identity(n, n));
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  BasicUnitary adjoint() const { return BasicUnitary(m_.adjoint()); }

 private:
  Matrix m_;
};

/// Rank-one projector |v><v| stored through its phase-fixed unit vector.
template <typename Real>
class BasicRankOneProjector {
 public:
  using Vector = VectorC<Real>;
  using Matrix = MatrixC<Real>;

  /// `v` must already have unit norm (within tol_unitary).
  explicit BasicRankOneProjector(Vector v) {
    detail::check_dim(v.size(), "rank-one projector");
    detail::check_finite(v, "rank-one projector");
    const double norm = static_cast<double>(v.norm());
    if (!(std::abs(norm - 1.0) < tol_unitary)) {
      throw InvalidArgument("projector vector must have unit norm, got " +
                            std::to_string(norm));
    }
    v_ = phase_fixed<Real>(std::move(v));
  }

  /// Normalizes `v` first; throws for the zero vector.
  static BasicRankOneProjector normalized(const Vector& v) {
    const Real norm = v.norm();
    if (!(norm > Real(tol_phase))) {
      throw InvalidArgument("cannot build a projector from a zero vector");
    }
    return BasicRankOneProjector(Vector(v / norm));
  }

  Eigen::Index dim() const { return v_.size(); }
  const Vector& vector() const { return v_; }
  Matrix matrix() const { return v_ * v_.adjoint(); }

 private:
  Vector v_;
};

/// Square matrix with A = A^dagger within tol_unitary.
template <typename Real>
class BasicHermitianObservable {
 public:
  using Matrix = MatrixC<Real>;

  explicit BasicHermitianObservable(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
      throw NotHermitian("observable must be square");
    }
    detail::check_dim(m_.rows(), "observable");
    detail::check_finite(m_, "observable");
    const double err = hermiticity_error(m_);
    if (!(err < tol_unitary)) {
      throw NotHermitian("matrix is not Hermitian: ||A - A^dagger||_F = " +
                         std::to_string(err));
    }
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

template <typename Real>
struct BasicEigendecomposition {
  /// Descending.
  std::vector<Real> eigenvalues;
  /// Column k is the phase-fixed eigenvector of eigenvalues[k].
  BasicUnitary<Real> eigenvectors;
};

/// Eigenvalues sorted descending; runs of equal eigenvalues (within
/// tol_phase) are ordered lexicographically by their phase-fixed eigenvectors.
template <typename Real>
BasicEigendecomposition<Real> hermitian_eigendecomposition(
    const BasicHermitianObservable<Real>& a) {
  using Matrix = MatrixC<Real>;
  using Vector = VectorC<Real>;
  const Eigen::Index n = a.dim();
  // Symmetrize so the solver, which reads one triangle, sees the exact input.
  const Matrix h = (a.matrix() + a.matrix().adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NumericalInconsistency("Hermitian eigensolver did not converge");
  }
  struct Entry {
    Real value;
    Vector vec;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    entries.push_back(
        {solver.eigenvalues()(k), phase_fixed<Real>(solver.eigenvectors().col(k))});
  }
  // Already descending; reorder tied runs.
  std::size_t start = 0;
  while (start < entries.size()) {
    std::size_t end = start + 1;
    while (end < entries.size() &&
           std::abs(entries[end].value - entries[start].value) <=
               Real(tol_phase)) {
      ++end;
    }
    std::sort(entries.begin() + start, entries.begin() + end,
              [](const Entry& x, const Entry& y) {
                return lexicographic_less<Real>(x.vec, y.vec);
              });
    start = end;
  }
  std::vector<Real> values;
  Matrix vecs(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    values.push_back(entries[static_cast<std::size_t>(k)].value);
    vecs.col(k) = entries[static_cast<std::size_t>(k)].vec;
  }
  return {std::move(values), BasicUnitary<Real>(std::move(vecs))};
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix, with each column
/// of Q rescaled by the phase of the matching R diagonal entry so that R has a
/// positive diagonal. Deterministic in (dim, seed).
template <typename Real = double>
BasicUnitary<Real> haar_random_unitary(Eigen::Index dim, std::uint64_t seed) {
  using Matrix = MatrixC<Real>;
  detail::check_dim(dim, "haar_random_unitary");
  RandomStream rng(seed, static_cast<std::uint64_t>(dim));
  Matrix g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto z = rng.complex_normal();
      g(i, j) = std::complex<Real>(Real(z.real()), Real(z.imag()));
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const std::complex<Real> d = r(j, j);
    const Real mag = std::abs(d);
    if (mag > Real(0)) q.col(j) *= d / mag;
  }
  return BasicUnitary<Real>(std::move(q));
}

/// U^t through the spectral decomposition of U, eigenphases taken in
/// (-pi, pi]. Phases within 1e-9 of -pi are put on the +pi side so that
/// rounding does not flip the branch. t = 0 and t = 1 return I and U exactly.
template <typename Real>
BasicUnitary<Real> matrix_power_spectral(const BasicUnitary<Real>& u, Real t) {
  using Matrix = MatrixC<Real>;
  if (!(t >= Real(0) && t <= Real(1))) {
    throw InvalidArgument("matrix_power_spectral: t must lie in [0, 1]");
  }
  const Eigen::Index n = u.dim();
  if (t == Real(0)) return BasicUnitary<Real>::identity(n);
  if (t == Real(1)) return u;
  // A unitary is normal, so its complex Schur form is diagonal.
  Eigen::ComplexSchur<Matrix> schur(u.matrix());
  if (schur.info() != Eigen::Success) {
    throw NumericalInconsistency("Schur decomposition did not converge");
  }
  const Matrix& q = schur.matrixU();
  const Matrix& tri = schur.matrixT();
  Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1> powered(n);
  const Real pi = std::numbers::pi_v<Real>;
  for (Eigen::Index k = 0; k < n; ++k) {
    Real phase = std::arg(tri(k, k));
    if (phase <= -pi + Real(1e-9)) phase += Real(2) * pi;
    powered(k) = std::polar(Real(1), phase * t);
  }
  Matrix out = q * powered.asDiagonal() * q.adjoint();
  return BasicUnitary<Real>(std::move(out));
}

using ComplexMatrix = MatrixC<double>;
using ComplexVector = VectorC<double>;
using UnitaryMatrix = BasicUnitary<double>;
using RankOneProjector = BasicRankOneProjector<double>;
using HermitianObservable = BasicHermitianObservable<double>;
using Eigendecomposition = BasicEigendecomposition<double>;

}  // namespace modality

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

#include <numbers>

#include "doctest.h"
#include "modality/linalg.hpp"
#include "test_util.hpp"

using namespace modality;
using modality::test::cvec;
using C = std::complex<double>;

TEST_CASE("multiply") {
  const ComplexMatrix m = test::random_hermitian(3, 1);
  CHECK((multiply(ComplexMatrix::Identity(3, 3), m) - m).norm() == 0.0);
  CHECK(multiply(m, ComplexMatrix::Zero(3, 3)).norm() == 0.0);

  ComplexMatrix x(2, 2), z(2, 2), expected(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  expected << 0, -1, 1, 0;
  CHECK((multiply(x, z) - expected).norm() == 0.0);

  CHECK_THROWS_AS(multiply(ComplexMatrix::Zero(2, 3), ComplexMatrix::Zero(2, 3)),
                  DimensionMismatch);
}

TEST_CASE("dagger") {
  Eigen::MatrixXd sym(2, 2);
  sym << 1, 2, 2, 5;
  CHECK((dagger(sym) - sym).norm() == 0.0);

  ComplexMatrix a(2, 2), expected(2, 2);
  a << 0, C(0, 1), 0, 0;
  expected << 0, 0, C(0, -1), 0;
  CHECK((dagger(a) - expected).norm() == 0.0);

  const ComplexMatrix h = haar_random_unitary(4, 3).matrix();
  CHECK((dagger(dagger(h)) - h).norm() == 0.0);
}

TEST_CASE("tensor_product") {
  CHECK((tensor_product(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)) -
         ComplexMatrix::Identity(4, 4))
            .norm() == 0.0);

  Eigen::MatrixXd a = Eigen::Vector2d(1, 2).asDiagonal();
  Eigen::MatrixXd b = Eigen::Vector2d(3, 4).asDiagonal();
  Eigen::MatrixXd expected = Eigen::Vector4d(3, 4, 6, 8).asDiagonal();
  CHECK((tensor_product(a, b) - expected).norm() == 0.0);

  const ComplexMatrix p = test::random_hermitian(3, 5);
  const ComplexMatrix q = test::random_hermitian(2, 6);
  CHECK(std::abs(tensor_product(p, q).trace() - p.trace() * q.trace()) < 1e-12);
}

TEST_CASE("hermitian_eigendecomposition") {
  SUBCASE("diagonal input keeps the standard basis") {
    ComplexMatrix d = Eigen::Vector3cd(5, 2, -1).asDiagonal();
    const auto eig = hermitian_eigendecomposition(HermitianObservable(d));
    CHECK(eig.eigenvalues == std::vector<double>{5, 2, -1});
    CHECK((eig.eigenvectors.matrix() - ComplexMatrix::Identity(3, 3)).norm() < 1e-14);
  }
  SUBCASE("ascending diagonal is reordered") {
    ComplexMatrix d = Eigen::Vector3cd(-1, 2, 5).asDiagonal();
    const auto eig = hermitian_eigendecomposition(HermitianObservable(d));
    CHECK(eig.eigenvalues == std::vector<double>{5, 2, -1});
    CHECK(std::abs(eig.eigenvectors.matrix()(2, 0) - 1.0) < 1e-14);
  }
  SUBCASE("pauli x") {
    // Characteristic polynomial l^2 - 1: eigenvalues +-1 with vectors (1, +-1)/sqrt2.
    ComplexMatrix x(2, 2);
    x << 0, 1, 1, 0;
    const auto eig = hermitian_eigendecomposition(HermitianObservable(x));
    CHECK(eig.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eig.eigenvalues[1] == doctest::Approx(-1.0).epsilon(1e-14));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK((eig.eigenvectors.matrix().col(0) - cvec({r, r})).norm() < 1e-14);
    CHECK((eig.eigenvectors.matrix().col(1) - cvec({r, -r})).norm() < 1e-14);
  }
  SUBCASE("reconstruction residual on random inputs up to N = 64") {
    for (Eigen::Index n : {1, 2, 5, 17, 64}) {
      const ComplexMatrix a = test::random_hermitian(n, static_cast<std::uint64_t>(n));
      const auto eig = hermitian_eigendecomposition(HermitianObservable(a));
      const Eigen::VectorXd lambda =
          Eigen::Map<const Eigen::VectorXd>(eig.eigenvalues.data(), n);
      const ComplexMatrix& v = eig.eigenvectors.matrix();
      const ComplexMatrix back = v * lambda.cast<C>().asDiagonal() * v.adjoint();
      CHECK((back - a).norm() < 10 * tol_unitary);
      for (Eigen::Index k = 1; k < n; ++k) CHECK(eig.eigenvalues[k - 1] >= eig.eigenvalues[k]);
    }
  }
  SUBCASE("degenerate eigenvalues are tie-broken lexicographically") {
    ComplexMatrix d = Eigen::Vector3cd(1, 1, 0).asDiagonal();
    const auto eig = hermitian_eigendecomposition(HermitianObservable(d));
    CHECK(!lexicographic_less<double>(eig.eigenvectors.matrix().col(1),
                                      eig.eigenvectors.matrix().col(0)));
  }
  SUBCASE("non-Hermitian input is rejected") {
    ComplexMatrix a(2, 2);
    a << 0, 1, 0, 0;
    CHECK_THROWS_AS(HermitianObservable{a}, NotHermitian);
  }
}

TEST_CASE("phase convention") {
  const ComplexVector v = phase_fixed<double>(cvec({0.0, C(0, 0.6), C(0.8, 0)}));
  CHECK(v(1).imag() == 0.0);
  CHECK(v(1).real() > 0.0);
  CHECK(v.norm() == doctest::Approx(1.0));

  const RankOneProjector p(cvec({C(0, 1) / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}));
  CHECK(p.vector()(0).imag() == 0.0);
  const ComplexMatrix m = p.matrix();
  CHECK((m * m - m).norm() < tol_unitary);
  CHECK((m - m.adjoint()).norm() < tol_unitary);
  CHECK(std::abs(m.trace() - 1.0) < tol_unitary);

  CHECK_THROWS_AS(RankOneProjector(cvec({1.0, 1.0})), InvalidArgument);
  CHECK_THROWS_AS(RankOneProjector::normalized(cvec({0.0, 0.0})), InvalidArgument);
}

TEST_CASE("dimension cap") {
  CHECK_THROWS_AS(UnitaryMatrix::identity(65), InvalidArgument);
  CHECK_NOTHROW(UnitaryMatrix::identity(64));
  ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(UnitaryMatrix{bad}, InvalidArgument);
  CHECK_THROWS_AS(UnitaryMatrix{ComplexMatrix::Identity(2, 2) * 1.1}, NotUnitary);
}

TEST_CASE("haar_random_unitary") {
  SUBCASE("unitary and deterministic") {
    for (Eigen::Index n = 1; n <= 12; ++n) {
      const auto u = haar_random_unitary(n, 42);
      CHECK(unitarity_error(u.matrix()) < tol_unitary);
      const auto again = haar_random_unitary(n, 42);
      CHECK((u.matrix().array() == again.matrix().array()).all());
    }
    CHECK((haar_random_unitary(3, 1).matrix() - haar_random_unitary(3, 2).matrix()).norm() > 0.1);
  }
  SUBCASE("first-column marginal at N = 2") {
    // For Haar U(2), |U_11|^2 is uniform on [0, 1]: mean 1/2, variance 1/12.
    double sum = 0.0, sum_sq = 0.0;
    const int samples = 10000;
    for (int s = 0; s < samples; ++s) {
      const double x = std::norm(haar_random_unitary(2, static_cast<std::uint64_t>(s)).matrix()(0, 0));
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / samples;
    CHECK(std::abs(mean - 0.5) < 0.02);
    CHECK(std::abs(sum_sq / samples - mean * mean - 1.0 / 12.0) < 0.01);
  }
  SUBCASE("long double instantiation") {
    const auto u = haar_random_unitary<long double>(3, 9);
    CHECK(unitarity_error(u.matrix()) < tol_unitary);
  }
}

TEST_CASE("matrix_power_spectral") {
  const auto u = haar_random_unitary(4, 11);
  CHECK((matrix_power_spectral(u, 0.0).matrix() - ComplexMatrix::Identity(4, 4)).norm() < tol_unitary);
  CHECK((matrix_power_spectral(u, 1.0).matrix() - u.matrix()).norm() < tol_unitary);
  // Near the endpoint the spectral route itself must land on u.
  CHECK((matrix_power_spectral(u, 1.0 - 1e-13).matrix() - u.matrix()).norm() < 1e-10);

  SUBCASE("square root of the swap") {
    // Swap = P+ - P- with P+- = (I +- X)/2; eigenphases 0 and pi give
    // sqrt(Swap) = P+ + i P-.
    ComplexMatrix swap(2, 2), expected(2, 2);
    swap << 0, 1, 1, 0;
    const C a(0.5, 0.5), b(0.5, -0.5);
    expected << a, b, b, a;
    const auto half = matrix_power_spectral(UnitaryMatrix(swap), 0.5);
    CHECK((half.matrix() - expected).norm() < tol_unitary);
    CHECK((half.matrix() * half.matrix() - swap).norm() < tol_unitary);
  }
  SUBCASE("unitary along the path") {
    for (int k = 0; k <= 20; ++k) {
      CHECK(unitarity_error(matrix_power_spectral(u, k / 20.0).matrix()) < tol_unitary);
    }
  }
  SUBCASE("composition") {
    const auto a = matrix_power_spectral(u, 0.3);
    const auto b = matrix_power_spectral(u, 0.7);
    CHECK((a.matrix() * b.matrix() - u.matrix()).norm() < 1e-10);
  }
  CHECK_THROWS_AS(matrix_power_spectral(u, 1.5), InvalidArgument);
}

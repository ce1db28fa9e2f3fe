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
#include "modality/probability.hpp"
#include "modality/reconstruction.hpp"
#include "modality/verify.hpp"
#include "test_util.hpp"

using namespace modality;
using modality::test::cvec;
using C = std::complex<double>;

namespace {

Context std_basis(Eigen::Index n) { return context_from_unitary(UnitaryMatrix::identity(n)); }

std::vector<ProjectorSample> samples_of(const DensityMatrix& rho, int contexts,
                                        std::uint64_t seed) {
  std::vector<ProjectorSample> out;
  for (int k = 0; k < contexts; ++k) {
    const Context c = random_context(rho.dim(), derived_seed(seed, static_cast<std::uint64_t>(k)));
    for (Eigen::Index i = 0; i < c.dim(); ++i) {
      out.push_back({c.projector(i), born_probability(rho, c.projector(i))});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("unitary_between_contexts") {
  const Context z = spin_context(0.5, {0, 0, 1});
  const Context x = spin_context(0.5, {1, 0, 0});
  const auto u = unitary_between_contexts(z, x);
  // Columns of the x basis: (1,1)/sqrt2 and (1,-1)/sqrt2.
  ComplexMatrix h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  CHECK((u.matrix() - h).norm() < 1e-14);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Context a = random_context(4, seed);
    const Context b = random_context(4, seed + 20);
    const Context c = random_context(4, seed + 40);
    const auto uab = unitary_between_contexts(a, b);
    CHECK(unitarity_error(uab.matrix()) < tol_unitary);
    for (Eigen::Index k = 0; k < 4; ++k) {
      const ComplexVector image = uab.matrix() * a.projector(k).vector();
      CHECK((image - b.projector(k).vector()).norm() < 1e-12);
    }
    const auto composed = multiply(unitary_between_contexts(b, c).matrix(), uab.matrix());
    CHECK((composed - unitary_between_contexts(a, c).matrix()).norm() < 1e-12);
    CHECK((unitary_between_contexts(a, a).matrix() - ComplexMatrix::Identity(4, 4)).norm() <
          1e-12);
  }
  CHECK_THROWS_AS(unitary_between_contexts(std_basis(2), std_basis(3)), DimensionMismatch);
}

TEST_CASE("orthogonality preservation") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Context a = random_context(5, seed);
    const Context b = random_context(5, seed + 1000);
    const auto r = orthogonality_preservation_check(a, b, unitary_between_contexts(a, b));
    CHECK(r.pass);
    CHECK(r.metrics.at("max_violation") < 1e-9);
  }
  const Context z = spin_context(0.5, {0, 0, 1});
  const Context x = spin_context(0.5, {1, 0, 0});
  CHECK_THROWS_AS(orthogonality_preservation_check(z, x, UnitaryMatrix::identity(2)),
                  InvalidArgument);
}

TEST_CASE("permutations") {
  CHECK(Permutation::identity(4).sign() == 1);
  CHECK(Permutation::transposition(4, 1, 3).sign() == -1);
  CHECK(Permutation({1, 2, 0}).sign() == 1);
  CHECK(Permutation({1, 0, 3, 2}).sign() == 1);
  CHECK(Permutation({1, 2, 3, 0}).sign() == -1);
  CHECK_THROWS_AS(Permutation({0, 0}), InvalidArgument);
  CHECK_THROWS_AS(Permutation::transposition(3, 1, 1), InvalidArgument);

  const Eigen::MatrixXd m = Permutation({1, 2, 0}).matrix();
  Eigen::MatrixXd expected(3, 3);
  expected << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  CHECK((m - expected).norm() == 0.0);

  CHECK(all_permutations(1).size() == 1);
  CHECK(all_permutations(4).size() == 24);
  int odd = 0;
  for (const auto& p : all_permutations(5)) {
    if (p.sign() < 0) ++odd;
    CHECK(p.matrix().determinant() == doctest::Approx(p.sign()));
  }
  CHECK(odd == 60);
}

TEST_CASE("permutation paths") {
  const auto swap = Permutation::transposition(2, 0, 1);
  CHECK((permutation_path(swap, 0.0).matrix() - ComplexMatrix::Identity(2, 2)).norm() == 0.0);
  CHECK((permutation_path(swap, 1.0).matrix() - swap.matrix().cast<C>()).norm() < 1e-12);
  const ComplexMatrix half = permutation_path(swap, 0.5).matrix();
  CHECK((half * half - swap.matrix().cast<C>()).norm() < 1e-12);
  CHECK_THROWS_AS(permutation_path(swap, -0.1), InvalidArgument);

  SUBCASE("obstruction witness") {
    const auto odd = real_obstruction_witness(Permutation::transposition(3, 0, 2));
    CHECK(odd.pass);
    CHECK(odd.metrics.at("determinant") == doctest::Approx(-1.0));
    CHECK(odd.metrics.at("real_path_exists") == 0.0);
    CHECK(odd.metrics.at("complex_path_max_unitarity_error") < 1e-10);
    CHECK(odd.metrics.at("complex_path_end_error") < 1e-10);

    const auto even = real_obstruction_witness(Permutation({1, 2, 0}));
    CHECK(even.pass);
    CHECK(even.metrics.at("determinant") == doctest::Approx(1.0));
    CHECK(even.metrics.at("real_path_exists") == 1.0);
  }
  SUBCASE("every permutation up to six elements") {
    for (int n = 1; n <= 6; ++n) {
      for (const auto& p : all_permutations(n)) {
        const auto r = real_obstruction_witness(p, 11);
        CHECK(r.pass);
        CHECK(r.metrics.at("complex_path_max_unitarity_error") < 1e-10);
      }
    }
  }
}

TEST_CASE("traceless Hermitian basis") {
  for (Eigen::Index n : {2, 3, 5}) {
    const auto basis = traceless_hermitian_basis(n);
    REQUIRE(basis.size() == static_cast<std::size_t>(n * n - 1));
    for (std::size_t a = 0; a < basis.size(); ++a) {
      CHECK(std::abs(basis[a].trace()) < 1e-14);
      CHECK(hermiticity_error(basis[a]) < 1e-15);
      for (std::size_t b = 0; b < basis.size(); ++b) {
        const C ip = (basis[a].adjoint() * basis[b]).trace();
        CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-14);
      }
    }
  }
}

TEST_CASE("gleason fit recovers the density matrix") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto rho = random_density_matrix(3, seed);
    const auto fit = gleason_fit(samples_of(rho, 5, seed), 3);
    CHECK((fit.rho_hat - rho.matrix()).norm() < 1e-8);
    CHECK(fit.residual < 1e-10);
    CHECK(fit.psd_violation < 1e-10);
  }
  const auto mm = DensityMatrix::maximally_mixed(4);
  const auto fit = gleason_fit(samples_of(mm, 6, 3), 4);
  CHECK((fit.rho_hat - ComplexMatrix::Identity(4, 4) / 4.0).norm() < 1e-8);

  SUBCASE("insufficient or degenerate samples") {
    const auto rho = random_density_matrix(3, 1);
    auto few = samples_of(rho, 3, 0);
    few.erase(few.begin() + 8, few.end());
    CHECK_THROWS_AS(gleason_fit(few, 3), RankDeficient);

    // Nine samples, but all from the standard basis: no off-diagonal information.
    std::vector<ProjectorSample> same;
    for (int rep = 0; rep < 3; ++rep) {
      for (Eigen::Index k = 0; k < 3; ++k) {
        const RankOneProjector p(ComplexVector::Unit(3, k));
        same.push_back({p, born_probability(rho, p)});
      }
    }
    CHECK_THROWS_AS(gleason_fit(same, 3), RankDeficient);
  }
}

TEST_CASE("qubit counterexample") {
  const QubitFrameCounterexample f;
  CHECK(f(Vec3(0, 0, 1)) == 1.0);
  CHECK(f(Vec3(0, 0, -1)) == 0.0);
  CHECK(f(Vec3(1, 0, 0)) == 0.5);
  // Antipodal completeness for arbitrary directions.
  for (double z : {-0.9, -0.2, 0.37, 0.81}) {
    const double r = std::sqrt(1 - z * z);
    CHECK(f(Vec3(r, 0, z)) + f(Vec3(-r, 0, -z)) == doctest::Approx(1.0).epsilon(1e-15));
  }
  // max |z^3 - z|/2 at z = 1/sqrt(3): 1/(3 sqrt 3).
  CHECK(counterexample_max_deviation(f) == doctest::Approx(1.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-6));
  CHECK(counterexample_max_deviation(f) == doctest::Approx(0.1925).epsilon(1e-3));

  const auto r = counterexample_report(f, 50, 0);
  CHECK(r.pass);
  CHECK(r.metrics.at("completeness_max_error") < 1e-15);
  CHECK(r.metrics.at("fit_residual") > 0.05);

  CHECK_THROWS_AS(QubitFrameCounterexample(1), InvalidArgument);
  CHECK_THROWS_AS(QubitFrameCounterexample(4), InvalidArgument);
  CHECK_THROWS_AS(counterexample_report(f, 5, 0), InvalidArgument);

  const Vec3 up = bloch_vector(RankOneProjector(cvec({1, 0})));
  CHECK((up - Vec3(0, 0, 1)).norm() < 1e-15);
  const double s = 1 / std::sqrt(2.0);
  const Vec3 y = bloch_vector(RankOneProjector(cvec({s, C(0, s)})));
  CHECK((y - Vec3(0, 1, 0)).norm() < 1e-15);
}

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

#include "modality/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "modality/probability.hpp"

namespace modality {

UnitaryMatrix unitary_between_contexts(const Context& a, const Context& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("unitary_between_contexts: contexts of dimension " +
                            std::to_string(a.dim()) + " and " +
                            std::to_string(b.dim()));
  }
  return UnitaryMatrix(b.basis().matrix() * a.basis().matrix().adjoint());
}

Report orthogonality_preservation_check(const Context& a, const Context& b,
                                        const UnitaryMatrix& u) {
  if (a.dim() != b.dim() || a.dim() != u.dim()) {
    throw DimensionMismatch("orthogonality_preservation_check: dimensions differ");
  }
  const Eigen::Index n = a.dim();
  std::vector<ComplexVector> images;
  double mapping_error = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    ComplexVector image = u.matrix() * a.projector(k).vector();
    const ComplexMatrix mapped = image * image.adjoint();
    mapping_error = std::max(mapping_error, (mapped - b.projector(k).matrix()).norm());
    images.push_back(std::move(image));
  }
  if (!(mapping_error < tol_extra)) {
    throw InvalidArgument("orthogonality_preservation_check: u does not map the "
                          "first context onto the second (error " +
                          std::to_string(mapping_error) + ")");
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      // tr(|x><x| |y><y|) = |<x|y>|^2
      worst = std::max(worst, std::norm(images[static_cast<std::size_t>(i)].dot(
                                  images[static_cast<std::size_t>(j)])));
    }
  }
  Report r;
  r.check_name = "orthogonality_preservation";
  r.pass = worst < 1e-9;
  r.metrics = {{"dim", static_cast<double>(n)},
               {"mapping_error", mapping_error},
               {"max_violation", worst}};
  return r;
}

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  const auto n = static_cast<Eigen::Index>(images_.size());
  detail::check_dim(n, "permutation");
  std::vector<char> seen(images_.size(), 0);
  for (int v : images_) {
    if (v < 0 || v >= static_cast<int>(n) || seen[static_cast<std::size_t>(v)]) {
      throw InvalidArgument("not a permutation of 0.." + std::to_string(n - 1));
    }
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> images(static_cast<std::size_t>(std::max(n, 0)));
  std::iota(images.begin(), images.end(), 0);
  return Permutation(std::move(images));
}

Permutation Permutation::transposition(int n, int i, int j) {
  auto p = identity(n).images_;
  if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
    throw InvalidArgument("transposition needs two distinct indices in range");
  }
  std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
  return Permutation(std::move(p));
}

int Permutation::sign() const {
  std::vector<char> visited(images_.size(), 0);
  int sign = 1;
  for (std::size_t start = 0; start < images_.size(); ++start) {
    if (visited[start]) continue;
    std::size_t length = 0;
    for (std::size_t k = start; !visited[k]; k = static_cast<std::size_t>(images_[k])) {
      visited[k] = 1;
      ++length;
    }
    if (length % 2 == 0) sign = -sign;
  }
  return sign;
}

Eigen::MatrixXd Permutation::matrix() const {
  const auto n = static_cast<Eigen::Index>(images_.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(images_[static_cast<std::size_t>(i)], i) = 1.0;
  return m;
}

std::vector<Permutation> all_permutations(int n) {
  std::vector<int> images = Permutation::identity(n).images();
  std::vector<Permutation> out;
  do {
    out.emplace_back(images);
  } while (std::next_permutation(images.begin(), images.end()));
  return out;
}

UnitaryMatrix permutation_path(const Permutation& perm, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw InvalidArgument("permutation_path: t = " + std::to_string(t) +
                          " outside [0, 1]");
  }
  const UnitaryMatrix p(perm.matrix().cast<std::complex<double>>());
  return matrix_power_spectral(p, t);
}

Report real_obstruction_witness(const Permutation& perm, int grid_points) {
  if (grid_points < 2) throw InvalidArgument("real_obstruction_witness: need at least 2 grid points");
  const Eigen::MatrixXd m = perm.matrix();
  const double det = m.determinant();
  const int sign = perm.sign();
  const Eigen::Index n = perm.size();
  const ComplexMatrix target = m.cast<std::complex<double>>();
  double max_unitarity = 0.0;
  double start_error = 0.0;
  double end_error = 0.0;
  for (int k = 0; k < grid_points; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(grid_points - 1);
    const UnitaryMatrix u = permutation_path(perm, t);
    max_unitarity = std::max(max_unitarity, unitarity_error(u.matrix()));
    if (k == 0) start_error = (u.matrix() - ComplexMatrix::Identity(n, n)).norm();
    if (k == grid_points - 1) end_error = (u.matrix() - target).norm();
  }
  Report r;
  r.check_name = "real_obstruction";
  r.metrics = {{"dim", static_cast<double>(n)},
               {"determinant", det},
               {"sign", static_cast<double>(sign)},
               {"odd", sign < 0 ? 1.0 : 0.0},
               {"real_path_exists", det > 0.0 ? 1.0 : 0.0},
               {"complex_path_max_unitarity_error", max_unitarity},
               {"complex_path_start_error", start_error},
               {"complex_path_end_error", end_error},
               {"grid_points", static_cast<double>(grid_points)}};
  r.pass = det == static_cast<double>(sign) && max_unitarity < tol_unitary &&
           start_error < tol_unitary && end_error < tol_unitary;
  return r;
}

std::vector<ComplexMatrix> traceless_hermitian_basis(Eigen::Index dim) {
  detail::check_dim(dim, "traceless_hermitian_basis");
  std::vector<ComplexMatrix> basis;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const std::complex<double> i(0.0, 1.0);
  for (Eigen::Index k = 0; k < dim; ++k) {
    for (Eigen::Index l = k + 1; l < dim; ++l) {
      ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
      s(k, l) = s(l, k) = inv_sqrt2;
      basis.push_back(std::move(s));
      ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
      a(k, l) = -i * inv_sqrt2;
      a(l, k) = i * inv_sqrt2;
      basis.push_back(std::move(a));
    }
  }
  for (Eigen::Index l = 1; l < dim; ++l) {
    ComplexMatrix d = ComplexMatrix::Zero(dim, dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (Eigen::Index k = 0; k < l; ++k) d(k, k) = scale;
    d(l, l) = -static_cast<double>(l) * scale;
    basis.push_back(std::move(d));
  }
  return basis;
}

GleasonFitResult gleason_fit(const std::vector<ProjectorSample>& samples,
                             Eigen::Index dim) {
  if (dim < 2) throw InvalidArgument("gleason_fit: dimension must be at least 2");
  detail::check_dim(dim, "gleason_fit");
  const auto m = static_cast<Eigen::Index>(samples.size());
  if (m < dim * dim) {
    throw RankDeficient("gleason_fit: insufficient samples, need at least " +
                        std::to_string(dim * dim) + " projectors, got " +
                        std::to_string(m));
  }
  const auto basis = traceless_hermitian_basis(dim);
  const auto params = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd design(m, params);
  Eigen::VectorXd rhs(m);
  const double uniform = 1.0 / static_cast<double>(dim);
  for (Eigen::Index s = 0; s < m; ++s) {
    const auto& sample = samples[static_cast<std::size_t>(s)];
    if (sample.projector.dim() != dim) {
      throw DimensionMismatch("gleason_fit: sample projector of dimension " +
                              std::to_string(sample.projector.dim()));
    }
    if (!(sample.probability >= 0.0 && sample.probability <= 1.0)) {
      throw InvalidArgument("gleason_fit: probability outside [0, 1]");
    }
    const ComplexVector& v = sample.projector.vector();
    for (Eigen::Index a = 0; a < params; ++a) {
      design(s, a) = v.dot(basis[static_cast<std::size_t>(a)] * v).real();
    }
    rhs(s) = sample.probability - uniform;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(design);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  const double cond = smallest > 0.0 ? sv(0) / smallest
                                     : std::numeric_limits<double>::infinity();
  if (!(cond < gleason_max_condition)) {
    throw RankDeficient("gleason_fit: ill-conditioned sample set, the projectors "
                        "do not span the Hermitian matrices (condition number " +
                        std::to_string(cond) + ")");
  }
  const Eigen::MatrixXd normal = design.transpose() * design;
  const Eigen::VectorXd coeffs = normal.llt().solve(design.transpose() * rhs);

  ComplexMatrix rho = ComplexMatrix::Identity(dim, dim) * uniform;
  for (Eigen::Index a = 0; a < params; ++a) rho += coeffs(a) * basis[static_cast<std::size_t>(a)];
  rho = ((rho + rho.adjoint()) / 2.0).eval();

  GleasonFitResult out;
  out.residual = std::sqrt((design * coeffs - rhs).squaredNorm() / static_cast<double>(m));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(rho, Eigen::EigenvaluesOnly);
  out.psd_violation = std::max(0.0, -eig.eigenvalues()(0));
  out.condition_number = cond;
  out.rho_hat = std::move(rho);
  return out;
}

Vec3 bloch_vector(const RankOneProjector& p) {
  if (p.dim() != 2) throw DimensionMismatch("bloch_vector: qubit projector required");
  const ComplexMatrix rho = p.matrix();
  // rho = (I + n.sigma)/2, so rho_01 = (n_x - i n_y)/2.
  return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(),
          (rho(0, 0) - rho(1, 1)).real()};
}

QubitFrameCounterexample::QubitFrameCounterexample(int exponent)
    : exponent_(exponent) {
  if (exponent < 3 || exponent % 2 == 0) {
    throw InvalidArgument("counterexample exponent must be odd and >= 3");
  }
}

namespace {

double int_power(double x, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= x;
  return out;
}

}  // namespace

double QubitFrameCounterexample::operator()(const Vec3& bloch) const {
  return (1.0 + int_power(bloch.z(), exponent_)) / 2.0;
}

double QubitFrameCounterexample::operator()(const RankOneProjector& p) const {
  return (*this)(bloch_vector(p));
}

double counterexample_max_deviation(const QubitFrameCounterexample& c,
                                    int scan_points) {
  if (scan_points < 2) throw InvalidArgument("scan needs at least 2 points");
  double worst = 0.0;
  for (int k = 0; k < scan_points; ++k) {
    const double x = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(scan_points - 1);
    worst = std::max(worst, std::abs((int_power(x, c.exponent()) - x) / 2.0));
  }
  return worst;
}

Report counterexample_report(const QubitFrameCounterexample& c,
                             int num_contexts, std::uint64_t seed) {
  if (num_contexts < 10) {
    throw InvalidArgument("counterexample_report: need at least 10 contexts");
  }
  std::vector<ProjectorSample> samples;
  double completeness = 0.0;
  for (int k = 0; k < num_contexts; ++k) {
    const Context ctx = context_from_unitary(
        haar_random_unitary(2, derived_seed(seed, static_cast<std::uint64_t>(k))));
    const double f0 = c(ctx.projector(0));
    const double f1 = c(ctx.projector(1));
    completeness = std::max(completeness, std::abs(f0 + f1 - 1.0));
    samples.push_back({ctx.projector(0), f0});
    samples.push_back({ctx.projector(1), f1});
  }
  const auto fit = gleason_fit(samples, 2);
  Report r;
  r.check_name = "qubit_counterexample";
  r.metrics = {{"exponent", static_cast<double>(c.exponent())},
               {"num_contexts", static_cast<double>(num_contexts)},
               {"completeness_max_error", completeness},
               {"fit_residual", fit.residual},
               {"fit_psd_violation", fit.psd_violation},
               {"max_deviation_from_linear", counterexample_max_deviation(c)}};
  r.pass = completeness < 1e-15 && fit.residual > 0.05;
  r.details = {{"note", "pass means the frame function is antipodally complete "
                        "yet not linear: no density matrix reproduces it"}};
  return r;
}

}  // namespace modality

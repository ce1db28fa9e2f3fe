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

#include "modality/probability.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "modality/format.hpp"
#include "modality/reconstruction.hpp"

namespace modality {

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw InvalidArgument("density matrix must be square");
  detail::check_dim(m_.rows(), "density matrix");
  detail::check_finite(m_, "density matrix");
  const double herm = hermiticity_error(m_);
  if (!(herm < tol_unitary)) {
    throw NotHermitian("density matrix is not Hermitian (" + std::to_string(herm) + ")");
  }
  const double trace_err = std::abs(m_.trace() - 1.0);
  if (!(trace_err < tol_unitary)) {
    throw InvalidArgument("density matrix trace differs from 1 by " +
                          std::to_string(trace_err));
  }
  const ComplexMatrix h = (m_ + m_.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  const double smallest = solver.eigenvalues()(0);
  if (smallest < -1e-10) {
    throw InvalidArgument("density matrix has negative eigenvalue " +
                          std::to_string(smallest));
  }
}

DensityMatrix DensityMatrix::pure(const RankOneProjector& p) {
  return DensityMatrix(p.matrix());
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index n) {
  detail::check_dim(n, "density matrix");
  return DensityMatrix(ComplexMatrix::Identity(n, n) / static_cast<double>(n));
}

DensityMatrix random_density_matrix(Eigen::Index dim, std::uint64_t seed) {
  const UnitaryMatrix u = haar_random_unitary(dim, seed);
  RandomStream rng(mix64(seed) + 1, static_cast<std::uint64_t>(dim));
  Eigen::VectorXd w(dim);
  for (Eigen::Index k = 0; k < dim; ++k) w(k) = -std::log(1.0 - rng.uniform());
  w /= w.sum();
  ComplexMatrix rho = u.matrix() * w.cast<std::complex<double>>().asDiagonal() *
                      u.matrix().adjoint();
  rho = (rho + rho.adjoint()).eval() / 2.0;
  return DensityMatrix(std::move(rho));
}

double clamp_probability(double p) {
  if (p >= 0.0 && p <= 1.0) return p;
  if (p < 0.0 && p >= -probability_clamp_window) return 0.0;
  if (p > 1.0 && p <= 1.0 + probability_clamp_window) return 1.0;
  throw NumericalInconsistency("probability " + std::to_string(p) +
                               " outside [0, 1]");
}

double born_probability(const DensityMatrix& rho, const RankOneProjector& p) {
  if (rho.dim() != p.dim()) {
    throw DimensionMismatch("born_probability: state of dimension " +
                            std::to_string(rho.dim()) + ", projector of dimension " +
                            std::to_string(p.dim()));
  }
  // tr(rho |v><v|) = <v| rho |v>
  const std::complex<double> value = p.vector().dot(rho.matrix() * p.vector());
  return clamp_probability(value.real());
}

double pure_born_probability(const RankOneProjector& q, const RankOneProjector& p) {
  if (q.dim() != p.dim()) {
    throw DimensionMismatch("pure_born_probability: dimensions " +
                            std::to_string(q.dim()) + " and " + std::to_string(p.dim()));
  }
  return clamp_probability(std::norm(q.vector().dot(p.vector())));
}

Eigen::VectorXd born_distribution(const DensityMatrix& rho, const Context& c) {
  Eigen::VectorXd out(c.dim());
  for (Eigen::Index k = 0; k < c.dim(); ++k) out(k) = born_probability(rho, c.projector(k));
  return out;
}

Eigen::VectorXd born_distribution(const RankOneProjector& q, const Context& c) {
  Eigen::VectorXd out(c.dim());
  for (Eigen::Index k = 0; k < c.dim(); ++k) out(k) = pure_born_probability(q, c.projector(k));
  return out;
}

double TransitionMatrix::max_row_sum_error() const {
  return (entries_.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

double TransitionMatrix::max_column_sum_error() const {
  return (entries_.colwise().sum().array() - 1.0).abs().maxCoeff();
}

TransitionMatrix transition_matrix(const Context& initial, const Context& final) {
  if (initial.dim() != final.dim()) {
    throw DimensionMismatch("transition_matrix: contexts of dimension " +
                            std::to_string(initial.dim()) + " and " +
                            std::to_string(final.dim()));
  }
  const Eigen::Index n = initial.dim();
  Eigen::MatrixXd t(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      t(i, j) = pure_born_probability(initial.projector(i), final.projector(j));
    }
  }
  UnitaryMatrix u = unitary_between_contexts(initial, final);
  // The connecting unitary written in the source basis: W_ij = <a_i| U |a_j>.
  const ComplexMatrix a = initial.basis().matrix();
  const ComplexMatrix w = a.adjoint() * u.matrix() * a;
  const double err = (t.array() - w.array().abs2()).abs().maxCoeff();
  if (!(err < 1e-10)) {
    throw NumericalInconsistency("transition matrix is not certified unistochastic (" +
                                 std::to_string(err) + ")");
  }
  return TransitionMatrix(std::move(t), initial, final, std::move(u), err);
}

std::string transition_matrix_to_csv(const TransitionMatrix& t) {
  std::string out;
  const auto& labels = t.target().labels();
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (j) out += ',';
    out += format_shortest(labels[j]);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < t.dim(); ++i) {
    for (Eigen::Index j = 0; j < t.dim(); ++j) {
      if (j) out += ',';
      out += format_shortest(t(i, j));
    }
    out += '\n';
  }
  return out;
}

nlohmann::json transition_matrix_to_json(const TransitionMatrix& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < t.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < t.dim(); ++j) row.push_back(t(i, j));
    rows.push_back(std::move(row));
  }
  return {{"source_labels", t.source().labels()},
          {"target_labels", t.target().labels()},
          {"entries", rows}};
}

std::vector<Eigen::VectorXd> distributions_for_state(
    const ExtravalenceClass& psi, const std::vector<Context>& contexts) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(contexts.size());
  for (const auto& c : contexts) {
    if (c.dim() != psi.dim()) {
      throw DimensionMismatch("distributions_for_state: context of dimension " +
                              std::to_string(c.dim()) + " for a state of dimension " +
                              std::to_string(psi.dim()));
    }
    out.push_back(born_distribution(psi.representative(), c));
  }
  return out;
}

double FrameFunction::operator()(const RankOneProjector& p) const {
  if (p.dim() != dim_) {
    throw DimensionMismatch("frame function of dimension " + std::to_string(dim_) +
                            " evaluated on projector of dimension " +
                            std::to_string(p.dim()));
  }
  return f_(p);
}

double FrameFunction::completeness_residual(const Context& c) const {
  double sum = 0.0;
  for (const auto& p : c.projectors()) sum += (*this)(p);
  return std::abs(sum - 1.0);
}

FrameFunction frame_function_from_density(DensityMatrix rho) {
  const Eigen::Index n = rho.dim();
  return FrameFunction(n, [rho = std::move(rho)](const RankOneProjector& p) {
    return born_probability(rho, p);
  });
}

namespace {

// Bron-Kerbosch with pivoting; `best` receives a maximum clique.
void max_clique(const std::vector<std::vector<char>>& adj, std::vector<int>& r,
                std::vector<int> p, std::vector<int> x, std::vector<int>& best) {
  if (p.empty() && x.empty()) {
    if (r.size() > best.size()) best = r;
    return;
  }
  if (r.size() + p.size() <= best.size()) return;
  int pivot = -1;
  std::size_t pivot_degree = 0;
  for (const auto* set : {&p, &x}) {
    for (int u : *set) {
      std::size_t deg = 0;
      for (int v : p) deg += adj[u][v] ? 1 : 0;
      if (pivot < 0 || deg > pivot_degree) {
        pivot = u;
        pivot_degree = deg;
      }
    }
  }
  std::vector<int> candidates;
  for (int v : p) {
    if (!adj[pivot][v]) candidates.push_back(v);
  }
  for (int v : candidates) {
    std::vector<int> p2, x2;
    for (int w : p) {
      if (adj[v][w]) p2.push_back(w);
    }
    for (int w : x) {
      if (adj[v][w]) x2.push_back(w);
    }
    r.push_back(v);
    max_clique(adj, r, std::move(p2), std::move(x2), best);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.push_back(v);
  }
}

}  // namespace

Report check_no_super_context(const std::vector<Context>& contexts) {
  Report report;
  report.check_name = "no_super_context";
  if (contexts.empty()) {
    report.pass = true;
    report.metrics = {{"num_contexts", 0.0}, {"max_exclusive_set_size", 0.0}};
    return report;
  }
  const Eigen::Index n = contexts.front().dim();
  for (const auto& c : contexts) {
    if (c.dim() != n) {
      throw DimensionMismatch("check_no_super_context: mixed dimensions");
    }
  }
  struct Node {
    int context;
    int index;
  };
  std::vector<Node> nodes;
  for (std::size_t c = 0; c < contexts.size(); ++c) {
    for (Eigen::Index k = 0; k < n; ++k) nodes.push_back({static_cast<int>(c), static_cast<int>(k)});
  }
  const std::size_t m = nodes.size();
  std::vector<std::vector<char>> adj(m, std::vector<char>(m, 0));
  nlohmann::json exclusive = nlohmann::json::array();
  nlohmann::json certain = nlohmann::json::array();
  std::size_t probabilistic = 0;
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t v = u + 1; v < m; ++v) {
      const auto& a = nodes[u];
      const auto& b = nodes[v];
      const double p = pure_born_probability(
          contexts[static_cast<std::size_t>(a.context)].projector(a.index),
          contexts[static_cast<std::size_t>(b.context)].projector(b.index));
      const bool is_exclusive = p < exclusive_threshold;
      adj[u][v] = adj[v][u] = is_exclusive ? 1 : 0;
      if (a.context == b.context) continue;
      if (is_exclusive) {
        exclusive.push_back({a.context, a.index, b.context, b.index});
      } else if (p > certain_threshold) {
        certain.push_back({a.context, a.index, b.context, b.index});
      } else {
        ++probabilistic;
      }
    }
  }
  std::vector<int> r, best;
  std::vector<int> all(m);
  for (std::size_t k = 0; k < m; ++k) all[k] = static_cast<int>(k);
  max_clique(adj, r, all, {}, best);
  std::sort(best.begin(), best.end());
  nlohmann::json best_json = nlohmann::json::array();
  for (int v : best) best_json.push_back({nodes[static_cast<std::size_t>(v)].context,
                                          nodes[static_cast<std::size_t>(v)].index});
  report.metrics = {
      {"dim", static_cast<double>(n)},
      {"num_contexts", static_cast<double>(contexts.size())},
      {"exclusive_cross_pairs", static_cast<double>(exclusive.size())},
      {"certain_cross_pairs", static_cast<double>(certain.size())},
      {"probabilistic_cross_pairs", static_cast<double>(probabilistic)},
      {"max_exclusive_set_size", static_cast<double>(best.size())},
  };
  report.pass = static_cast<Eigen::Index>(best.size()) <= n;
  report.details = {{"exclusive_pairs", exclusive},
                    {"certain_pairs", certain},
                    {"max_exclusive_set", best_json}};
  return report;
}

}  // namespace modality

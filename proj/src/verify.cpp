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

#include "modality/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "modality/probability.hpp"
#include "modality/reconstruction.hpp"

namespace modality {

Context random_context(Eigen::Index dim, std::uint64_t seed) {
  return context_from_unitary(haar_random_unitary(dim, seed));
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, RandomStream& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t k = n; k > 1; --k) {
    std::swap(idx[k - 1], idx[rng.next_u64() % k]);
  }
  return idx;
}

std::vector<double> default_labels(Eigen::Index n) {
  std::vector<double> l(static_cast<std::size_t>(n));
  std::iota(l.begin(), l.end(), 0.0);
  return l;
}

std::uint64_t dim_seed(std::uint64_t seed, int dim) {
  return derived_seed(seed, 1000003ULL * static_cast<std::uint64_t>(dim));
}

}  // namespace

std::vector<Context> shared_projector_family(Eigen::Index dim, int count,
                                             std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("family needs at least one context");
  RandomStream rng(seed, static_cast<std::uint64_t>(dim));
  std::vector<Context> family{random_context(dim, derived_seed(seed, 0))};
  for (int k = 1; k < count; ++k) {
    const Context& parent = family[rng.next_u64() % family.size()];
    const auto order = shuffled_indices(static_cast<std::size_t>(dim), rng);
    std::vector<ComplexVector> vecs;
    if (dim < 2 || rng.uniform() < 0.25) {
      for (auto i : order) vecs.push_back(parent.projector(static_cast<Eigen::Index>(i)).vector());
    } else {
      const auto keep = static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(dim - 1));
      const Eigen::Index rest = dim - keep;
      ComplexMatrix span(dim, rest);
      for (Eigen::Index i = 0; i < dim; ++i) {
        const auto src = static_cast<Eigen::Index>(order[static_cast<std::size_t>(i)]);
        if (i < keep) {
          vecs.push_back(parent.projector(src).vector());
        } else {
          span.col(i - keep) = parent.projector(src).vector();
        }
      }
      const ComplexMatrix rotated =
          span * haar_random_unitary(rest, derived_seed(seed, static_cast<std::uint64_t>(k))).matrix();
      for (Eigen::Index c = 0; c < rest; ++c) vecs.emplace_back(rotated.col(c));
    }
    family.push_back(Context::from_vectors(vecs, default_labels(dim)));
  }
  return family;
}

std::vector<Report> verify_unistochastic(const std::vector<int>& dims, int samples,
                                         std::uint64_t seed) {
  std::vector<Report> out;
  for (int dim : dims) {
    double row = 0.0, col = 0.0, uni = 0.0, range = 0.0;
    bool ok = true;
    const std::uint64_t base = dim_seed(seed, dim);
    for (int s = 0; s < samples; ++s) {
      const auto k = static_cast<std::uint64_t>(s);
      const Context a = random_context(dim, derived_seed(base, 2 * k));
      const Context b = random_context(dim, derived_seed(base, 2 * k + 1));
      try {
        const auto t = transition_matrix(a, b);
        row = std::max(row, t.max_row_sum_error());
        col = std::max(col, t.max_column_sum_error());
        // Recompute |<a_i|U|a_j>|^2 from the connecting unitary directly.
        const ComplexMatrix& u = t.connecting_unitary().matrix();
        for (Eigen::Index i = 0; i < dim; ++i) {
          for (Eigen::Index j = 0; j < dim; ++j) {
            const double w = std::norm(a.projector(i).vector().dot(u * a.projector(j).vector()));
            uni = std::max(uni, std::abs(t(i, j) - w));
            range = std::max({range, -t(i, j), t(i, j) - 1.0});
          }
        }
      } catch (const NumericalInconsistency&) {
        ok = false;
      }
    }
    Report r;
    r.check_name = "unistochastic_dim" + std::to_string(dim);
    r.metrics = {{"dim", static_cast<double>(dim)},
                 {"samples", static_cast<double>(samples)},
                 {"max_row_sum_error", row},
                 {"max_column_sum_error", col},
                 {"max_unistochastic_error", uni},
                 {"max_range_violation", std::max(range, 0.0)}};
    r.pass = ok && row < 1e-10 && col < 1e-10 && uni < 1e-10 && range <= 1e-12;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Report> verify_gleason(const std::vector<int>& dims, int samples,
                                   std::uint64_t seed) {
  std::vector<Report> out;
  for (int dim : dims) {
    const std::uint64_t base = dim_seed(seed, dim);
    const DensityMatrix rho = random_density_matrix(dim, derived_seed(base, 0));
    std::vector<ProjectorSample> born, uniform;
    for (int s = 0; s < samples; ++s) {
      const Context c = random_context(dim, derived_seed(base, static_cast<std::uint64_t>(s) + 1));
      for (const auto& p : c.projectors()) {
        born.push_back({p, born_probability(rho, p)});
        uniform.push_back({p, 1.0 / static_cast<double>(dim)});
      }
    }
    Report r;
    r.check_name = "gleason_dim" + std::to_string(dim);
    try {
      const auto fit = gleason_fit(born, dim);
      const double err = (fit.rho_hat - rho.matrix()).norm();
      const auto mixed = gleason_fit(uniform, dim);
      const double mixed_err =
          (mixed.rho_hat - DensityMatrix::maximally_mixed(dim).matrix()).norm();
      r.metrics = {{"dim", static_cast<double>(dim)},
                   {"contexts", static_cast<double>(samples)},
                   {"frobenius_error", err},
                   {"residual", fit.residual},
                   {"psd_violation", fit.psd_violation},
                   {"condition_number", fit.condition_number},
                   {"maximally_mixed_error", mixed_err}};
      r.pass = err < 1e-8 && fit.residual < 1e-10 && fit.psd_violation < 1e-9 &&
               mixed_err < 1e-8;
    } catch (const RankDeficient& e) {
      r.metrics = {{"dim", static_cast<double>(dim)},
                   {"contexts", static_cast<double>(samples)}};
      r.details = {{"error", e.what()}};
      r.pass = false;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Report> verify_counterexample(int samples, std::uint64_t seed) {
  const QubitFrameCounterexample c(3);
  Report counter = counterexample_report(c, samples, seed);
  // Control: genuine Born data on the same contexts fits to rounding.
  const DensityMatrix rho = random_density_matrix(2, derived_seed(seed, 1u << 20));
  std::vector<ProjectorSample> born;
  for (int k = 0; k < samples; ++k) {
    const Context ctx = context_from_unitary(
        haar_random_unitary(2, derived_seed(seed, static_cast<std::uint64_t>(k))));
    for (const auto& p : ctx.projectors()) born.push_back({p, born_probability(rho, p)});
  }
  const auto fit = gleason_fit(born, 2);
  Report control;
  control.check_name = "qubit_born_control";
  const double counter_residual = counter.metrics.at("fit_residual");
  control.metrics = {{"born_fit_residual", fit.residual},
                     {"counterexample_fit_residual", counter_residual},
                     {"separation_ratio", fit.residual > 0.0 ? counter_residual / fit.residual
                                                             : std::numeric_limits<double>::infinity()}};
  control.pass = fit.residual < 1e-10 && counter_residual > 10.0 * fit.residual;
  const double max_dev = counter.metrics.at("max_deviation_from_linear");
  const double analytic = 1.0 / (3.0 * std::sqrt(3.0));
  counter.metrics["analytic_max_deviation"] = analytic;
  counter.pass = counter.pass && std::abs(max_dev - analytic) < 1e-3;
  return {std::move(counter), std::move(control)};
}

std::vector<Report> verify_permutation(const std::vector<int>& dims) {
  std::vector<Report> out;
  for (int n : dims) {
    int count = 0, failures = 0, transpositions = 0, bad_transpositions = 0;
    double max_unitarity = 0.0, max_endpoint = 0.0;
    for (const auto& perm : all_permutations(n)) {
      const Report w = real_obstruction_witness(perm, 101);
      ++count;
      if (!w.pass) ++failures;
      max_unitarity = std::max(max_unitarity, w.metrics.at("complex_path_max_unitarity_error"));
      max_endpoint = std::max({max_endpoint, w.metrics.at("complex_path_start_error"),
                               w.metrics.at("complex_path_end_error")});
      int moved = 0;
      for (int i = 0; i < n; ++i) moved += perm(i) != i ? 1 : 0;
      if (moved == 2) {
        ++transpositions;
        if (w.metrics.at("determinant") != -1.0) ++bad_transpositions;
      }
    }
    Report r;
    r.check_name = "permutation_n" + std::to_string(n);
    r.metrics = {{"n", static_cast<double>(n)},
                 {"permutations", static_cast<double>(count)},
                 {"failures", static_cast<double>(failures)},
                 {"transpositions", static_cast<double>(transpositions)},
                 {"transpositions_with_det_not_minus_one", static_cast<double>(bad_transpositions)},
                 {"max_unitarity_error", max_unitarity},
                 {"max_endpoint_error", max_endpoint}};
    r.pass = failures == 0 && bad_transpositions == 0;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Report> verify_extravalence(const std::vector<int>& dims, int samples,
                                        std::uint64_t seed) {
  std::vector<Report> out;
  for (int dim : dims) {
    std::size_t relation_violations = 0, probability_mismatches = 0, class_mismatches = 0;
    std::size_t modalities = 0, extravalent_pairs = 0;
    const std::uint64_t base = dim_seed(seed, dim);
    for (int s = 0; s < samples; ++s) {
      const auto family = shared_projector_family(dim, 5, derived_seed(base, static_cast<std::uint64_t>(s)));
      std::vector<Modality> ms;
      for (const auto& c : family) {
        for (Eigen::Index k = 0; k < c.dim(); ++k) ms.emplace_back(c, k);
      }
      const std::size_t m = ms.size();
      modalities += m;
      std::vector<std::vector<char>> rel(m, std::vector<char>(m, 0));
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          rel[i][j] = extravalent(ms[i], ms[j]) ? 1 : 0;
          if (i < j && rel[i][j]) ++extravalent_pairs;
          const bool certain =
              pure_born_probability(ms[i].projector(), ms[j].projector()) > certain_threshold;
          if (certain != static_cast<bool>(rel[i][j])) ++probability_mismatches;
          const bool same = same_class(extravalence_class_of(ms[i]), extravalence_class_of(ms[j]));
          if (same != static_cast<bool>(rel[i][j])) ++class_mismatches;
        }
      }
      for (std::size_t i = 0; i < m; ++i) {
        if (!rel[i][i]) ++relation_violations;
        for (std::size_t j = 0; j < m; ++j) {
          if (rel[i][j] != rel[j][i]) ++relation_violations;
          if (!rel[i][j]) continue;
          for (std::size_t k = 0; k < m; ++k) {
            if (rel[j][k] && !rel[i][k]) ++relation_violations;
          }
        }
      }
    }
    Report r;
    r.check_name = "extravalence_dim" + std::to_string(dim);
    r.metrics = {{"dim", static_cast<double>(dim)},
                 {"families", static_cast<double>(samples)},
                 {"modalities", static_cast<double>(modalities)},
                 {"extravalent_pairs", static_cast<double>(extravalent_pairs)},
                 {"relation_violations", static_cast<double>(relation_violations)},
                 {"probability_mismatches", static_cast<double>(probability_mismatches)},
                 {"class_mismatches", static_cast<double>(class_mismatches)}};
    r.pass = relation_violations == 0 && probability_mismatches == 0 && class_mismatches == 0;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Report> verify_super_context(const std::vector<int>& dims, int samples,
                                         std::uint64_t seed) {
  std::vector<Report> out;
  for (int dim : dims) {
    int violations = 0;
    double largest = 0.0, exclusive_pairs = 0.0, certain_pairs = 0.0;
    const std::uint64_t base = dim_seed(seed, dim);
    for (int s = 0; s < samples; ++s) {
      const auto k = static_cast<std::uint64_t>(s);
      const int count = 2 + static_cast<int>(derived_seed(base, k) % 4);
      const auto family = shared_projector_family(dim, count, derived_seed(base, k + (1u << 20)));
      const Report rep = check_no_super_context(family);
      if (!rep.pass) ++violations;
      largest = std::max(largest, rep.metrics.at("max_exclusive_set_size"));
      exclusive_pairs += rep.metrics.at("exclusive_cross_pairs");
      certain_pairs += rep.metrics.at("certain_cross_pairs");
    }
    Report r;
    r.check_name = "super_context_dim" + std::to_string(dim);
    r.metrics = {{"dim", static_cast<double>(dim)},
                 {"corpora", static_cast<double>(samples)},
                 {"violations", static_cast<double>(violations)},
                 {"largest_exclusive_set", largest},
                 {"exclusive_cross_pairs", exclusive_pairs},
                 {"certain_cross_pairs", certain_pairs}};
    r.pass = violations == 0 && largest <= static_cast<double>(dim);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> available_suites() {
  return {"unistochastic", "gleason", "counterexample", "permutation", "extravalence",
          "super-context"};
}

std::vector<Report> run_suite(const std::string& suite,
                              const std::optional<std::vector<int>>& dims,
                              const std::optional<int>& samples, std::uint64_t seed) {
  auto dims_or = [&](std::vector<int> fallback) { return dims ? *dims : fallback; };
  auto samples_or = [&](int fallback) { return samples ? *samples : fallback; };
  if (samples && *samples < 1) throw InvalidArgument("samples must be at least 1");
  if (dims) {
    for (int d : *dims) {
      if (d < 1 || d > max_dim) throw InvalidArgument("dimension " + std::to_string(d) + " out of range");
    }
  }
  if (suite == "unistochastic") {
    return verify_unistochastic(dims_or({2, 3, 4, 5, 6, 7, 8}), samples_or(200), seed);
  }
  if (suite == "gleason") return verify_gleason(dims_or({3}), samples_or(20), seed);
  if (suite == "counterexample") return verify_counterexample(samples_or(50), seed);
  if (suite == "permutation") {
    const auto d = dims_or({1, 2, 3, 4, 5, 6});
    for (int n : d) {
      if (n > 8) throw InvalidArgument("permutation suite enumerates all permutations; n <= 8");
    }
    return verify_permutation(d);
  }
  if (suite == "extravalence") return verify_extravalence(dims_or({2, 3, 4}), samples_or(20), seed);
  if (suite == "super-context") {
    return verify_super_context(dims_or({2, 3, 4, 5, 6}), samples_or(100), seed);
  }
  std::string names;
  for (const auto& s : available_suites()) names += (names.empty() ? "" : ", ") + s;
  throw InvalidArgument("unknown suite '" + suite + "'; available: " + names);
}

}  // namespace modality

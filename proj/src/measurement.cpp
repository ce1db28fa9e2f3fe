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

#include "modality/measurement.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>

#include "modality/format.hpp"

namespace modality {

Eigen::Index SystemState::dim() const {
  return std::visit([](const auto& k) { return k.dim(); }, kind_);
}

const RankOneProjector& SystemState::projector() const {
  if (!is_modal()) throw InvalidArgument("state is mixed, not modal");
  return std::get<RankOneProjector>(kind_);
}

const DensityMatrix& SystemState::density() const {
  if (is_modal()) throw InvalidArgument("state is modal, not mixed");
  return std::get<DensityMatrix>(kind_);
}

Eigen::VectorXd SystemState::distribution(const Context& c) const {
  if (c.dim() != dim()) {
    throw DimensionMismatch("state of dimension " + std::to_string(dim()) +
                            " measured in a context of dimension " +
                            std::to_string(c.dim()));
  }
  if (is_modal()) return born_distribution(projector(), c);
  return born_distribution(density(), c);
}

MeasurementOutcome measure(const SystemState& state, const Context& context,
                           RandomStream& rng) {
  const Eigen::VectorXd probs = state.distribution(context);
  const double u = rng.uniform();
  if (state.is_modal()) {
    const ComplexMatrix p = state.projector().matrix();
    for (Eigen::Index k = 0; k < context.dim(); ++k) {
      if ((p - context.projector(k).matrix()).norm() < tol_extra) {
        MeasurementRecord rec{0, context.name(), k, context.label(k), 1.0};
        return {Modality(context, k), state, std::move(rec)};
      }
    }
  }
  // Inverse CDF in modality order.
  Eigen::VectorXd cdf(probs.size());
  double total = 0.0;
  Eigen::Index last_possible = 0;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    if (probs(k) >= sampling_zero) {
      total += probs(k);
      last_possible = k;
    }
    cdf(k) = total;
  }
  const double target = u * total;
  Eigen::Index chosen = last_possible;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    if (probs(k) >= sampling_zero && target < cdf(k)) {
      chosen = k;
      break;
    }
  }
  MeasurementRecord rec{0, context.name(), chosen, context.label(chosen), probs(chosen)};
  return {Modality(context, chosen), SystemState::modal(context.projector(chosen)),
          std::move(rec)};
}

std::vector<MeasurementRecord> run_sequence(const SystemState& initial,
                                            const std::vector<Context>& contexts,
                                            RandomStream& rng) {
  std::vector<MeasurementRecord> records;
  records.reserve(contexts.size());
  SystemState state = initial;
  for (std::size_t k = 0; k < contexts.size(); ++k) {
    auto outcome = measure(state, contexts[k], rng);
    outcome.record.step = static_cast<int>(k);
    if (outcome.record.context_id.empty()) {
      outcome.record.context_id = "C" + std::to_string(k);
    }
    records.push_back(std::move(outcome.record));
    state = std::move(outcome.state);
  }
  return records;
}

RecordBatch run_batch(const SystemState& initial, const std::vector<Context>& contexts,
                      std::uint64_t seed, std::uint64_t trials) {
  for (const auto& c : contexts) {
    if (c.dim() != initial.dim()) {
      throw DimensionMismatch("run_batch: context of dimension " +
                              std::to_string(c.dim()) + " for a state of dimension " +
                              std::to_string(initial.dim()));
    }
  }
  RecordBatch batch;
  batch.reserve(trials);
  for (std::uint64_t r = 0; r < trials; ++r) {
    RandomStream rng(seed, r);
    batch.push_back(run_sequence(initial, contexts, rng));
  }
  return batch;
}

std::vector<Eigen::VectorXd> exact_step_distributions(
    const SystemState& initial, const std::vector<Context>& contexts) {
  std::vector<Eigen::VectorXd> out;
  if (contexts.empty()) return out;
  out.push_back(initial.distribution(contexts.front()));
  for (std::size_t k = 1; k < contexts.size(); ++k) {
    const auto t = transition_matrix(contexts[k - 1], contexts[k]);
    out.push_back(t.entries().transpose() * out.back());
  }
  return out;
}

Eigen::VectorXd EmpiricalDistribution::frequencies() const {
  Eigen::VectorXd f(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t k = 0; k < counts.size(); ++k) {
    f(static_cast<Eigen::Index>(k)) =
        static_cast<double>(counts[k]) / static_cast<double>(total);
  }
  return f;
}

EmpiricalDistribution empirical_distribution(std::span<const MeasurementRecord> records,
                                             int step, Eigen::Index dim) {
  EmpiricalDistribution d;
  d.counts.assign(static_cast<std::size_t>(dim), 0);
  for (const auto& r : records) {
    if (r.step != step) continue;
    if (r.modality_index < 0 || r.modality_index >= dim) {
      throw InvalidArgument("record index out of range");
    }
    ++d.counts[static_cast<std::size_t>(r.modality_index)];
    ++d.total;
  }
  if (d.total == 0) {
    throw InvalidArgument("no records at step " + std::to_string(step));
  }
  return d;
}

EmpiricalDistribution empirical_distribution(const RecordBatch& batch, int step,
                                             Eigen::Index dim) {
  EmpiricalDistribution d;
  d.counts.assign(static_cast<std::size_t>(dim), 0);
  for (const auto& run : batch) {
    const auto part = empirical_distribution(std::span<const MeasurementRecord>(run),
                                             step, dim);
    for (std::size_t k = 0; k < d.counts.size(); ++k) d.counts[k] += part.counts[k];
    d.total += part.total;
  }
  if (d.total == 0) {
    throw InvalidArgument("no records at step " + std::to_string(step));
  }
  return d;
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw DimensionMismatch("total_variation: lengths differ");
  return 0.5 * (p - q).cwiseAbs().sum();
}

double chi_square_critical(int degrees_of_freedom, double significance) {
  if (degrees_of_freedom < 1) throw InvalidArgument("chi-square needs dof >= 1");
  const boost::math::chi_squared_distribution<double> dist(degrees_of_freedom);
  return boost::math::quantile(boost::math::complement(dist, significance));
}

Report goodness_of_fit(const Eigen::VectorXd& empirical, const Eigen::VectorXd& exact,
                       std::uint64_t num_trials) {
  if (empirical.size() != exact.size()) {
    throw DimensionMismatch("goodness_of_fit: vectors of length " +
                            std::to_string(empirical.size()) + " and " +
                            std::to_string(exact.size()));
  }
  if (num_trials < 1) throw InvalidArgument("goodness_of_fit: num_trials must be >= 1");
  const auto n = static_cast<double>(num_trials);
  double chi2 = 0.0;
  int categories = 0;
  for (Eigen::Index k = 0; k < exact.size(); ++k) {
    const double expected = n * exact(k);
    const double observed = n * empirical(k);
    if (exact(k) < sampling_zero) {
      if (observed > 0.5) chi2 = std::numeric_limits<double>::infinity();
      continue;
    }
    ++categories;
    chi2 += (observed - expected) * (observed - expected) / expected;
  }
  const int dof = categories - 1;
  const double critical = dof >= 1 ? chi_square_critical(dof)
                                   : std::numeric_limits<double>::infinity();
  Report r;
  r.check_name = "goodness_of_fit";
  r.metrics = {{"tv_distance", total_variation(empirical, exact)},
               {"chi_square", chi2},
               {"degrees_of_freedom", static_cast<double>(dof)},
               {"critical_value", critical},
               {"significance", fit_significance},
               {"num_trials", n}};
  r.pass = dof >= 1 ? chi2 <= critical : chi2 < 1e-6;
  return r;
}

nlohmann::json record_to_json(const MeasurementRecord& r) {
  return {{"step", r.step},
          {"context_id", r.context_id},
          {"modality_index", r.modality_index},
          {"label", r.label},
          {"probability_assigned", r.probability_assigned}};
}

std::string records_to_jsonl(const RecordBatch& batch) {
  std::string out;
  for (const auto& run : batch) {
    for (const auto& r : run) {
      out += record_to_json(r).dump();
      out += '\n';
    }
  }
  return out;
}

std::string records_to_csv(const RecordBatch& batch) {
  std::string out = "step,context_id,index,label,probability_assigned\n";
  for (const auto& run : batch) {
    for (const auto& r : run) {
      out += std::to_string(r.step) + ',' + r.context_id + ',' +
             std::to_string(r.modality_index) + ',' + format_shortest(r.label) + ',' +
             format_shortest(r.probability_assigned) + '\n';
    }
  }
  return out;
}

}  // namespace modality

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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "modality/format.hpp"
#include "modality/measurement.hpp"
#include "modality/reconstruction.hpp"
#include "modality/scenarios.hpp"
#include "modality/verify.hpp"

using namespace modality;

namespace {

constexpr std::uint64_t kSeed = 20261016;

struct Outcome {
  bool pass = false;
  std::string summary;
};

std::string g(double x) { return format_sig6(x); }

double metric_max(const std::vector<Report>& rs, const std::string& key) {
  double m = 0.0;
  for (const auto& r : rs) m = std::max(m, r.metrics.at(key));
  return m;
}

bool all_pass(const std::vector<Report>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const Report& r) { return r.pass; });
}

Outcome unistochastic() {
  const auto rs = verify_unistochastic({2, 3, 4, 5, 6, 7, 8}, 200, kSeed);
  const double row = metric_max(rs, "max_row_sum_error");
  const double col = metric_max(rs, "max_column_sum_error");
  const double uni = metric_max(rs, "max_unistochastic_error");
  const bool ok = all_pass(rs) && row < 1e-10 && col < 1e-10 && uni < 1e-10;
  return {ok, "dims 2-8 x 200 pairs: max row err " + g(row) + ", col err " + g(col) +
                  ", |T - |U|^2| " + g(uni)};
}

Outcome repeatability() {
  const std::uint64_t trials = 100000;
  std::uint64_t exceptions = 0;
  // Aligned modal state measured in its own context.
  const Context c = random_context(4, kSeed);
  for (const auto& run : run_batch(SystemState::modal(c.projector(2)), {c}, kSeed, trials)) {
    if (run[0].modality_index != 2) ++exceptions;
  }
  // A random first outcome followed by the same context again.
  const Context other = random_context(4, kSeed + 1);
  const auto batch = run_batch(SystemState::modal(other.projector(0)), {c, c}, kSeed, trials);
  for (const auto& run : batch) {
    if (run[1].modality_index != run[0].modality_index) ++exceptions;
  }
  return {exceptions == 0, std::to_string(2 * trials) + " repeated measurements, " +
                               std::to_string(exceptions) + " exceptions"};
}

Outcome context_change() {
  const std::uint64_t trials = 100000;
  const Context u = spin_context(2.0, {0, 0, 1});
  const Context v = spin_context(2.0, {1, 0, 0});
  const auto state = SystemState::modal(u.projector(0));
  const auto exact = exact_step_distributions(state, {u, v, u});
  const auto batch = run_batch(state, {u, v, u}, kSeed, trials);
  const auto freq = empirical_distribution(batch, 2, 5).frequencies();
  const auto fit = goodness_of_fit(freq, exact[2], trials);
  const double tv = fit.metrics.at("tv_distance");
  const bool ok = tv < 0.01 && fit.pass;
  return {ok, "spin-2 z/x/z third step: TV " + g(tv) + ", chi2 " +
                  g(fit.metrics.at("chi_square")) + " vs " +
                  g(fit.metrics.at("critical_value")) + " (df " +
                  g(fit.metrics.at("degrees_of_freedom")) + ")"};
}

Outcome gleason() {
  const auto rs = verify_gleason({3}, 20, kSeed);
  const auto& r = rs.front();
  const double err = r.metrics.at("frobenius_error");
  const double res = r.metrics.at("residual");
  const double psd = r.metrics.at("psd_violation");
  const bool ok = r.pass && err < 1e-8 && res < 1e-10 && psd < 1e-9;
  return {ok, "dim 3, 20 contexts: |rho_hat - rho| " + g(err) + ", residual " + g(res) +
                  ", psd violation " + g(psd)};
}

Outcome qubit_failure() {
  const QubitFrameCounterexample f(3);
  const auto r = counterexample_report(f, 50, kSeed);
  const double completeness = r.metrics.at("completeness_max_error");
  const double residual = r.metrics.at("fit_residual");
  const double dev = r.metrics.at("max_deviation_from_linear");
  const bool ok = completeness < 1e-15 && residual > 0.05 && std::abs(dev - 0.1925) <= 0.001;
  return {ok, "completeness err " + g(completeness) + ", fit residual " + g(residual) +
                  ", max deviation " + g(dev)};
}

Outcome permutations() {
  double unitarity = 0.0, endpoints = 0.0;
  int count = 0, transpositions = 0, bad = 0;
  for (int n = 1; n <= 6; ++n) {
    for (const auto& p : all_permutations(n)) {
      const auto w = real_obstruction_witness(p, 101);
      ++count;
      unitarity = std::max(unitarity, w.metrics.at("complex_path_max_unitarity_error"));
      endpoints = std::max({endpoints, w.metrics.at("complex_path_start_error"),
                            w.metrics.at("complex_path_end_error")});
      int moved = 0;
      for (int i = 0; i < n; ++i) moved += p(i) != i ? 1 : 0;
      if (moved == 2) {
        ++transpositions;
        if (w.metrics.at("determinant") != -1.0) ++bad;
      }
    }
  }
  const bool ok = unitarity < 1e-10 && endpoints == 0.0 && bad == 0;
  return {ok, std::to_string(count) + " permutations: max unitarity err " + g(unitarity) +
                  ", endpoint err " + g(endpoints) + ", " + std::to_string(transpositions) +
                  " transpositions with det != -1: " + std::to_string(bad)};
}

Outcome interferometer() {
  const auto r = scenario_mach_zehnder(0.0, true, 100000, kSeed);
  const double direct = r.metrics.at("port_A_probability_direct");
  double worst = 0.0;
  for (const auto& d : r.empirical) {
    if (d.name != "output_with_path") continue;
    for (Eigen::Index k = 0; k < d.probabilities.size(); ++k) {
      worst = std::max(worst, std::abs(d.probabilities(k) - 0.5));
    }
  }
  const bool ok = std::abs(direct - 1.0) < 1e-12 && worst < 0.01;
  return {ok, "phase 0 port A probability " + format_shortest(direct) +
                  "; with path measurement max |freq - 1/2| " + g(worst)};
}

Outcome singlet() {
  RandomStream rng(kSeed, 8);
  auto random_direction = [&] {
    Vec3 v(rng.normal(), rng.normal(), rng.normal());
    return Vec3(v / v.norm());
  };
  double e_err = 0.0, joint_err = 0.0;
  std::uint64_t joint_misses = 0;
  for (int k = 0; k < 100; ++k) {
    const Vec3 a = random_direction();
    const Vec3 b = random_direction();
    const auto r = scenario_singlet(a, b, 1000, derived_seed(kSeed, static_cast<std::uint64_t>(k)));
    e_err = std::max(e_err, std::abs(r.metrics.at("E_exact") + a.dot(b)));
    joint_err = std::max(joint_err, std::abs(r.metrics.at("joint_singlet_probability") - 1.0));
    if (r.metrics.at("joint_singlet_frequency") != 1.0) ++joint_misses;
  }
  const auto chsh = scenario_chsh(optimal_chsh_directions(), 100000, kSeed);
  const double s_exact = chsh.metrics.at("S_exact");
  const double s_emp = chsh.metrics.at("S_empirical");
  const double tsirelson = 2.0 * std::numbers::sqrt2;
  const bool ok = e_err < 1e-12 && joint_err < 1e-12 && joint_misses == 0 &&
                  std::abs(s_exact - tsirelson) < 1e-10 && std::abs(s_emp - tsirelson) < 0.05;
  return {ok, "100 pairs: max |E + a.b| " + g(e_err) + ", joint singlet misses " +
                  std::to_string(joint_misses) + "; CHSH S exact " + g(s_exact) +
                  ", empirical " + g(s_emp)};
}

Outcome no_super_context() {
  const auto rs = verify_super_context({2, 3, 4, 5, 6}, 100, kSeed);
  double violations = 0.0;
  for (const auto& r : rs) violations += r.metrics.at("violations");
  return {all_pass(rs) && violations == 0.0,
          "dims 2-6 x 100 corpora: " + g(violations) + " oversized exclusive sets"};
}

// -- CLI determinism -----------------------------------------------------------

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "modality_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = MODALITY_CLI_PATH;
  const std::string specs = MODALITY_SPECS_DIR;
  const std::vector<std::string> commands = {
      "scenario mach_zehnder --phase 0 --trials 100000 --seed 42 --format json",
      "scenario sequential_spin --j 2 --u 0,0,1 --v 1,0,0 --initial 2 --format csv",
      "scenario singlet --a 0,0,1 --b 0.6,0,0.8 --trials 20000 --seed 7",
      "scenario chsh --trials 20000 --seed 3 --format json",
      "verify unistochastic --dims 2,3,4 --samples 200 --seed 1 --format json",
      "verify gleason --dims 3 --samples 20",
      "verify counterexample --samples 50 --format csv",
      "verify permutation --dims 1,2,3,4",
      "verify extravalence --seed 5",
      "verify super-context --dims 2,3 --samples 20 --format json",
      "simulate " + specs + "/spin2_uvu.json --format json",
      "simulate " + specs + "/repeat_z.json --seed 9",
      "simulate " + specs + "/qutrit_mixed.json --format csv",
  };
  int mismatches = 0, failures = 0;
  std::size_t files = 0;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    std::vector<std::string> outputs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / ("out" + std::to_string(k) + "_" + std::to_string(rep));
      const fs::path rec = dir / ("rec" + std::to_string(k) + "_" + std::to_string(rep) + ".jsonl");
      std::string cmd = "\"" + cli + "\" " + commands[k] + " --output \"" + out.string() + "\"";
      if (commands[k].rfind("simulate", 0) == 0) cmd += " --records \"" + rec.string() + "\"";
      cmd += " 2>/dev/null";
      if (run(cmd) != 0) ++failures;
      std::string text = slurp(out);
      if (fs::exists(rec)) text += "\n--records--\n" + slurp(rec);
      outputs.push_back(std::move(text));
      ++files;
    }
    if (outputs[0].empty() || outputs[0] != outputs[1]) ++mismatches;
  }
  fs::remove_all(dir);
  return {mismatches == 0 && failures == 0,
          std::to_string(commands.size()) + " commands run twice (" + std::to_string(files) +
              " outputs): " + std::to_string(mismatches) + " differing, " +
              std::to_string(failures) + " non-zero exits"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {"unistochastic structure", unistochastic},
      {"repeatability", repeatability},
      {"context-change randomness", context_change},
      {"density matrix recovery (dim 3)", gleason},
      {"qubit frame function counterexample", qubit_failure},
      {"permutation connectivity", permutations},
      {"interferometer certainty", interferometer},
      {"singlet correlations", singlet},
      {"no super-context", no_super_context},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("[%s] %2zu %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].name,
                o.summary.c_str(), secs);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
              criteria.size());
  return failed == 0 ? 0 : 1;
}

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

// Command-line front end: scenario, verify and simulate.
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 on a usage
// or input error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "modality/errors.hpp"
#include "modality/format.hpp"
#include "modality/measurement.hpp"
#include "modality/scenarios.hpp"
#include "modality/verify.hpp"

using namespace modality;
using nlohmann::json;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

struct CliConfig {
  std::string format = "table";
  std::uint64_t seed = 0;
  std::uint64_t trials = 100000;
  std::string output_path;
};

/// Rendered output plus the overall verdict.
struct Output {
  std::string text;
  bool pass = false;
};

std::string sig6(double x) { return format_sig6(x); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// -- scenario ---------------------------------------------------------------

ScenarioSpec spec_from_args(const std::string& name, const std::vector<std::string>& args,
                            const CliConfig& cfg) {
  ScenarioSpec spec;
  spec.name = name;
  spec.seed = cfg.seed;
  spec.trials = cfg.trials;
  for (std::size_t k = 0; k < args.size(); ++k) {
    std::string token = args[k];
    std::string key, value;
    if (token.rfind("--", 0) == 0) token = token.substr(2);
    const auto eq = token.find('=');
    if (eq != std::string::npos) {
      key = token.substr(0, eq);
      value = token.substr(eq + 1);
    } else if (args[k].rfind("--", 0) == 0) {
      if (k + 1 >= args.size()) throw InvalidArgument("parameter --" + token + " needs a value");
      key = token;
      value = args[++k];
    } else {
      throw InvalidArgument("unexpected argument '" + args[k] +
                            "'; parameters are --key value or key=value");
    }
    if (key.empty()) throw InvalidArgument("empty parameter name in '" + args[k] + "'");
    if (key == "dimension") {
      const auto v = parse_parameter_text(value);
      const double* d = std::get_if<double>(&v);
      if (!d || *d < 1 || *d != std::floor(*d)) {
        throw InvalidArgument("dimension must be a positive integer");
      }
      spec.dimension = static_cast<Eigen::Index>(*d);
      continue;
    }
    spec.parameters[key] = parse_parameter_text(value);
  }
  return spec;
}

Output render_scenario(const ScenarioReport& r, const std::string& format) {
  Output out{{}, r.pass};
  if (format == "json") {
    out.text = scenario_report_to_json(r).dump(2) + "\n";
    return out;
  }
  std::ostringstream os;
  if (format == "csv") {
    os << "section,name,key,value\n";
    os << "header,scenario,seed," << r.seed << "\n";
    os << "header,scenario,trials," << r.trials << "\n";
    os << "header,scenario,pass," << (r.pass ? "true" : "false") << "\n";
    auto dists = [&](const char* section, const std::vector<LabeledDistribution>& ds) {
      for (const auto& d : ds) {
        for (std::size_t k = 0; k < d.outcomes.size(); ++k) {
          os << section << ',' << csv_field(d.name) << ',' << csv_field(d.outcomes[k]) << ','
             << format_shortest(d.probabilities(static_cast<Eigen::Index>(k))) << "\n";
        }
      }
    };
    dists("exact", r.exact);
    dists("empirical", r.empirical);
    for (const auto& [k, v] : r.metrics) {
      os << "metric," << csv_field(r.scenario) << ',' << csv_field(k) << ','
         << format_shortest(v) << "\n";
    }
    out.text = os.str();
    return out;
  }
  os << "scenario " << r.scenario << "\n";
  os << "seed     " << r.seed << "\n";
  os << "trials   " << r.trials << "\n";
  os << "pass     " << (r.pass ? "yes" : "no") << "\n";
  auto dists = [&](const char* title, const std::vector<LabeledDistribution>& ds) {
    os << "\n" << title << "\n";
    for (const auto& d : ds) {
      os << "  " << d.name << "\n";
      for (std::size_t k = 0; k < d.outcomes.size(); ++k) {
        os << "    " << std::left << std::setw(8) << d.outcomes[k]
           << sig6(d.probabilities(static_cast<Eigen::Index>(k))) << "\n";
      }
    }
  };
  dists("exact", r.exact);
  dists("empirical", r.empirical);
  os << "\nmetrics\n";
  for (const auto& [k, v] : r.metrics) {
    os << "  " << std::left << std::setw(34) << k << sig6(v) << "\n";
  }
  if (!r.notes.empty()) {
    os << "\nnotes\n";
    for (const auto& n : r.notes) os << "  " << n << "\n";
  }
  out.text = os.str();
  return out;
}

// -- verify -----------------------------------------------------------------

Output render_reports(const std::string& title, const std::vector<Report>& reports,
                      const json& header, const std::string& format) {
  Output out{{}, true};
  for (const auto& r : reports) out.pass = out.pass && r.pass;
  if (format == "json") {
    json j = header;
    j["pass"] = out.pass;
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    j["reports"] = std::move(arr);
    out.text = j.dump(2) + "\n";
    return out;
  }
  std::ostringstream os;
  if (format == "csv") {
    os << "check,pass,metric,value\n";
    for (const auto& r : reports) {
      for (const auto& [k, v] : r.metrics) {
        os << csv_field(r.check_name) << ',' << (r.pass ? "true" : "false") << ','
           << csv_field(k) << ',' << format_shortest(v) << "\n";
      }
    }
    out.text = os.str();
    return out;
  }
  os << title << "\n";
  for (const auto& [k, v] : header.items()) {
    os << std::left << std::setw(9) << k << (v.is_string() ? v.get<std::string>() : v.dump())
       << "\n";
  }
  os << std::left << std::setw(9) << "pass" << (out.pass ? "yes" : "no") << "\n";
  for (const auto& r : reports) {
    os << "\n" << r.check_name << "  " << (r.pass ? "PASS" : "FAIL") << "\n";
    for (const auto& [k, v] : r.metrics) {
      os << "  " << std::left << std::setw(34) << k << sig6(v) << "\n";
    }
    if (r.details.is_object() && r.details.contains("note")) {
      os << "  note: " << r.details["note"].get<std::string>() << "\n";
    }
  }
  out.text = os.str();
  return out;
}

// -- simulate ---------------------------------------------------------------

struct SimulationSpec {
  Eigen::Index dimension = 0;
  std::optional<SystemState> initial;
  std::vector<Context> contexts;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(path + ": malformed JSON at " + line_column(text, at));
  }
}

Context context_at(const json& j, const std::string& field) {
  try {
    return context_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(field + ": " + e.what());
  }
}

SystemState initial_state(const json& j, const std::vector<Context>& contexts) {
  if (j.is_string()) {
    if (j.get<std::string>() == "maximally_mixed") {
      return SystemState::mixed(DensityMatrix::maximally_mixed(contexts.front().dim()));
    }
    throw ParseError("initial: the only named state is \"maximally_mixed\"");
  }
  if (!j.is_object()) throw ParseError("initial: expected an object or \"maximally_mixed\"");
  if (!j.contains("index") || !j["index"].is_number_integer()) {
    throw ParseError("initial.index: expected an integer");
  }
  const auto index = j["index"].get<long long>();
  Context source = contexts.front();
  if (j.contains("context")) {
    const auto& c = j["context"];
    if (c.is_number_integer()) {
      const auto k = c.get<long long>();
      if (k < 0 || k >= static_cast<long long>(contexts.size())) {
        throw ParseError("initial.context: index out of range");
      }
      source = contexts[static_cast<std::size_t>(k)];
    } else {
      source = context_at(c, "initial.context");
    }
  }
  if (index < 0 || index >= source.dim()) throw ParseError("initial.index: out of range");
  return SystemState::modal(source.projector(static_cast<Eigen::Index>(index)));
}

SimulationSpec simulation_spec_from_json(const json& j, const CliConfig& cfg,
                                         bool trials_given, bool seed_given) {
  if (!j.is_object()) throw ParseError("simulation spec: expected an object");
  SimulationSpec s;
  if (!j.contains("contexts") || !j["contexts"].is_array() || j["contexts"].empty()) {
    throw ParseError("contexts: expected a non-empty array");
  }
  for (std::size_t k = 0; k < j["contexts"].size(); ++k) {
    s.contexts.push_back(context_at(j["contexts"][k], "contexts[" + std::to_string(k) + "]"));
  }
  s.dimension = s.contexts.front().dim();
  if (j.contains("dimension")) {
    if (!j["dimension"].is_number_integer() ||
        j["dimension"].get<long long>() != static_cast<long long>(s.dimension)) {
      throw ParseError("dimension: does not match the contexts");
    }
  }
  for (std::size_t k = 0; k < s.contexts.size(); ++k) {
    if (s.contexts[k].dim() != s.dimension) {
      throw ParseError("contexts[" + std::to_string(k) + "]: dimension differs from contexts[0]");
    }
  }
  if (!j.contains("initial")) throw ParseError("initial: required");
  s.initial = initial_state(j["initial"], s.contexts);
  s.trials = cfg.trials;
  s.seed = cfg.seed;
  if (j.contains("trials") && !trials_given) {
    if (!j["trials"].is_number_unsigned() || j["trials"].get<std::uint64_t>() == 0) {
      throw ParseError("trials: expected a positive integer");
    }
    s.trials = j["trials"].get<std::uint64_t>();
  }
  if (j.contains("seed") && !seed_given) {
    if (!j["seed"].is_number_unsigned()) throw ParseError("seed: expected a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  return s;
}

std::string context_id(const Context& c, std::size_t k) {
  return c.name().empty() ? "C" + std::to_string(k) : c.name();
}

Output run_simulation(const SimulationSpec& s, const std::string& records_path,
                      const std::string& format) {
  const auto batch = run_batch(*s.initial, s.contexts, s.seed, s.trials);
  const auto exact = exact_step_distributions(*s.initial, s.contexts);
  std::vector<Report> steps;
  for (std::size_t k = 0; k < s.contexts.size(); ++k) {
    const auto freq =
        empirical_distribution(batch, static_cast<int>(k), s.dimension).frequencies();
    Report r = goodness_of_fit(freq, exact[k], s.trials);
    r.check_name = "step" + std::to_string(k) + "_" + context_id(s.contexts[k], k);
    std::uint64_t exceptions = 0;
    if (k > 0 && approx_equal(s.contexts[k], s.contexts[k - 1])) {
      for (const auto& run : batch) {
        if (run[k].modality_index != run[k - 1].modality_index) ++exceptions;
      }
      r.metrics["repeat_exceptions"] = static_cast<double>(exceptions);
      r.pass = r.pass && exceptions == 0;
    }
    json dist = json::array();
    for (Eigen::Index i = 0; i < s.dimension; ++i) {
      dist.push_back({{"index", i},
                      {"label", s.contexts[k].label(i)},
                      {"exact", exact[k](i)},
                      {"empirical", freq(i)}});
    }
    r.details = {{"distribution", dist}};
    steps.push_back(std::move(r));
  }
  if (!records_path.empty()) {
    std::ofstream out(records_path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + records_path + "'");
    const bool csv = records_path.size() >= 4 &&
                     records_path.compare(records_path.size() - 4, 4, ".csv") == 0;
    out << (csv ? records_to_csv(batch) : records_to_jsonl(batch));
  }
  const json header = {{"seed", s.seed},
                       {"trials", s.trials},
                       {"dim", s.dimension},
                       {"steps", s.contexts.size()}};
  return render_reports("simulation", steps, header, format);
}

// Separates scenario parameters from the global options in a scenario
// command line, so that both may appear in any order after the name.
struct SplitArgs {
  std::vector<std::string> cli;
  std::vector<std::string> params;
};

SplitArgs split_scenario_args(int argc, char** argv) {
  static const std::vector<std::string> valued{"--format", "--seed", "--trials", "--output"};
  auto is_valued = [&](const std::string& t) {
    return std::find(valued.begin(), valued.end(), t) != valued.end();
  };
  auto is_global = [&](const std::string& t) {
    if (t == "-h" || t == "--help" || t == "--help-all" || is_valued(t)) return true;
    const auto eq = t.find('=');
    return eq != std::string::npos && is_valued(t.substr(0, eq));
  };
  SplitArgs out;
  const std::vector<std::string> args(argv + 1, argv + argc);
  std::size_t k = 0;
  int bare = 0;
  for (; k < args.size() && bare < 2; ++k) {
    out.cli.push_back(args[k]);
    if (is_valued(args[k]) && k + 1 < args.size()) {
      out.cli.push_back(args[++k]);
    } else if (!is_global(args[k])) {
      ++bare;
      if (bare == 1 && args[k] != "scenario") return {args, {}};
    }
  }
  for (; k < args.size(); ++k) {
    if (is_global(args[k])) {
      out.cli.push_back(args[k]);
      if (is_valued(args[k]) && k + 1 < args.size()) out.cli.push_back(args[++k]);
    } else {
      out.params.push_back(args[k]);
      const bool flag = args[k].rfind("--", 0) == 0 && args[k].find('=') == std::string::npos;
      if (flag && k + 1 < args.size()) out.params.push_back(args[++k]);
    }
  }
  return out;
}

int emit(const Output& out, const CliConfig& cfg) {
  if (cfg.output_path.empty()) {
    std::cout << out.text;
    std::cout.flush();
  } else {
    std::ofstream f(cfg.output_path, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write '" << cfg.output_path << "'\n";
      return exit_usage;
    }
    f << out.text;
  }
  return out.pass ? exit_pass : exit_fail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contexts, systems and modalities: scenarios, property suites and simulation"};
  app.name("modality_cli");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Show help for every command");

  CliConfig cfg;
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"table", "json", "csv"}))
      ->capture_default_str();
  auto* seed_opt = app.add_option("--seed", cfg.seed, "Random seed")
                       ->envname("MODALITY_ENGINE_SEED")
                       ->capture_default_str();
  auto* trials_opt = app.add_option("--trials", cfg.trials, "Trials per measurement run")
                         ->check(CLI::PositiveNumber)
                         ->capture_default_str();
  app.add_option("--output", cfg.output_path, "Write the report to this file");

  auto* scenario = app.add_subcommand("scenario", "Run a named scenario");
  std::string scenario_name;
  scenario->add_option("name", scenario_name, "Scenario name")->required();
  scenario->footer("Parameters: --key value or key=value. Scenarios: chsh, mach_zehnder, "
                   "sequential_spin, singlet.");

  auto* verify = app.add_subcommand("verify", "Run a property suite");
  std::string suite;
  std::vector<int> dims;
  int samples = 0;
  verify->add_option("suite", suite, "Suite name")
      ->required()
      ->check(CLI::IsMember(available_suites()));
  auto* dims_opt = verify->add_option("--dims", dims, "Dimensions, e.g. 2,3,4")->delimiter(',');
  auto* samples_opt =
      verify->add_option("--samples", samples, "Samples per dimension")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Run a measurement sequence from a spec file");
  std::string spec_path, records_path;
  simulate->add_option("spec", spec_path, "Simulation spec (JSON)")->required();
  simulate->add_option("--records", records_path,
                       "Write per-run records (JSON Lines, or CSV for a .csv path)");

  auto split = split_scenario_args(argc, argv);
  std::reverse(split.cli.begin(), split.cli.end());
  try {
    app.parse(split.cli);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (scenario->parsed()) {
      const auto spec = spec_from_args(scenario_name, split.params, cfg);
      return emit(render_scenario(load_scenario(spec), cfg.format), cfg);
    }
    if (verify->parsed()) {
      std::optional<std::vector<int>> d;
      std::optional<int> n;
      if (dims_opt->count() > 0) d = dims;
      if (samples_opt->count() > 0) n = samples;
      const auto reports = run_suite(suite, d, n, cfg.seed);
      json header = {{"suite", suite}, {"seed", cfg.seed}};
      if (n) header["samples"] = *n;
      if (d) header["dims"] = *d;
      return emit(render_reports("verify " + suite, reports, header, cfg.format), cfg);
    }
    const auto spec = simulation_spec_from_json(read_json_file(spec_path), cfg,
                                                trials_opt->count() > 0,
                                                seed_opt->count() > 0);
    return emit(run_simulation(spec, records_path, cfg.format), cfg);
  } catch (const NumericalInconsistency& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_fail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
}

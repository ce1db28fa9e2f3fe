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

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "modality/format.hpp"

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result cli(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + "\"" + MODALITY_CLI_PATH + "\" " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

const std::string specs = MODALITY_SPECS_DIR;

}  // namespace

TEST_CASE("cli scenario") {
  const auto mz = cli("scenario mach_zehnder --phase 0 --trials 100000 --seed 42 --format json");
  CHECK(mz.status == 0);
  const auto j = nlohmann::json::parse(mz.out);
  CHECK(j["metrics"]["port_A_probability"].get<double>() == doctest::Approx(1.0));
  CHECK(j["seed"] == 42);
  CHECK(j["trials"] == 100000);

  const auto bogus = cli("scenario bogus");
  CHECK(bogus.status == 2);
  CHECK(bogus.out.find("mach_zehnder") != std::string::npos);
  CHECK(bogus.out.find("singlet") != std::string::npos);

  const auto singlet = cli("scenario singlet --a 0,0,1 --b 0,0,1 --trials 10000");
  CHECK(singlet.status == 0);
  CHECK(singlet.out.find("E_exact                           -1\n") != std::string::npos);
  CHECK(singlet.out.find("seed     0\n") != std::string::npos);
  CHECK(singlet.out.find("trials   10000\n") != std::string::npos);

  const auto kv = cli("scenario singlet a=0,0,1 b=0,0,1 --trials 10000");
  CHECK(kv.out == singlet.out);

  CHECK(cli("scenario mach_zehnder").status == 2);
  CHECK(cli("scenario mach_zehnder --phase").status == 2);
  CHECK(cli("scenario mach_zehnder --phase abc").status == 2);
  CHECK(cli("scenario sequential_spin --j 1/3 --u 0,0,1 --v 1,0,0 --initial 0").status == 2);
  CHECK(cli("scenario mach_zehnder --phase 0 --dimension 3").status == 2);
}

TEST_CASE("cli usage errors") {
  CHECK(cli("").status == 2);
  CHECK(cli("frobnicate").status == 2);
  CHECK(cli("--format xml scenario mach_zehnder --phase 0").status == 2);
  CHECK(cli("verify nonsense").status == 2);
  CHECK(cli("verify gleason --dims two").status == 2);
  CHECK(cli("verify gleason --samples 0").status == 2);
  CHECK(cli("verify permutation --dims 9").status == 2);
  CHECK(cli("--help").status == 0);
}

TEST_CASE("cli verify") {
  const auto uni = cli("verify unistochastic --dims 2,3,4 --samples 200 --seed 1 --format json");
  CHECK(uni.status == 0);
  const auto j = nlohmann::json::parse(uni.out);
  CHECK(j["pass"] == true);
  REQUIRE(j["reports"].size() == 3);
  for (const auto& r : j["reports"]) {
    CHECK(r["metrics"]["max_row_sum_error"].get<double>() < 1e-10);
    CHECK(r["metrics"]["max_column_sum_error"].get<double>() < 1e-10);
  }

  const auto gl = cli("verify gleason --dims 3 --samples 20 --format json");
  CHECK(gl.status == 0);
  CHECK(nlohmann::json::parse(gl.out)["reports"][0]["metrics"]["frobenius_error"].get<double>() <
        1e-8);

  const auto ce = cli("verify counterexample --samples 50");
  CHECK(ce.status == 0);
  CHECK(ce.out.find("fit_residual") != std::string::npos);

  const auto csv = cli("verify permutation --dims 3 --format csv");
  CHECK(csv.status == 0);
  CHECK(csv.out.rfind("check,pass,metric,value\n", 0) == 0);
  CHECK(csv.out.find("permutation_n3,true,permutations,6\n") != std::string::npos);
}

TEST_CASE("cli simulate") {
  const auto rec = std::filesystem::temp_directory_path() / "modality_cli_records.jsonl";
  const auto repeat = cli("simulate " + specs + "/repeat_z.json --format json --records " +
                          rec.string());
  CHECK(repeat.status == 0);
  const auto j = nlohmann::json::parse(repeat.out);
  CHECK(j["reports"][1]["metrics"]["repeat_exceptions"] == 0.0);
  std::ifstream in(rec);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 300000);

  const auto spin2 = cli("simulate " + specs + "/spin2_uvu.json --format json");
  CHECK(spin2.status == 0);
  const auto s = nlohmann::json::parse(spin2.out);
  CHECK(s["reports"][2]["metrics"]["tv_distance"].get<double>() < 0.01);

  const auto bad = temp_file("modality_bad.json", "{\"contexts\": [\n  {\"spin\": 1,\n   oops}]}");
  const auto malformed = cli("simulate " + bad.string());
  CHECK(malformed.status == 2);
  CHECK(malformed.out.find("line 3") != std::string::npos);

  const auto field = temp_file(
      "modality_field.json",
      R"({"contexts": [{"spin": 1, "direction": [0, 0, 1]}], "initial": {"index": 7}})");
  const auto bad_field = cli("simulate " + field.string());
  CHECK(bad_field.status == 2);
  CHECK(bad_field.out.find("initial.index") != std::string::npos);

  CHECK(cli("simulate /nonexistent/spec.json").status == 2);
}

TEST_CASE("cli seeds and determinism") {
  const std::string cmd = "scenario singlet --a 0,0,1 --b 1,0,0 --trials 2000 --format csv";
  const auto a = cli(cmd);
  const auto b = cli(cmd);
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(cli(cmd + " --seed 0").out == a.out);
  CHECK(cli(cmd + " --seed 1").out != a.out);
  CHECK(cli(cmd, "MODALITY_ENGINE_SEED=1 ").out == cli(cmd + " --seed 1").out);
  CHECK(cli(cmd + " --seed 0", "MODALITY_ENGINE_SEED=1 ").out == a.out);
  CHECK(cli(cmd, "MODALITY_ENGINE_SEED=x ").status == 2);

  const auto out = std::filesystem::temp_directory_path() / "modality_cli_out.json";
  CHECK(cli(cmd + " --output " + out.string()).out.empty());
  std::ifstream f(out, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(text == a.out);
}

TEST_CASE("number formatting") {
  using modality::format_shortest;
  using modality::format_sig6;
  CHECK(format_shortest(0.1) == "0.1");
  CHECK(format_shortest(100000) == "100000");
  CHECK(format_shortest(-0.0) == "0");
  CHECK(format_shortest(1e300) == "1e+300");
  CHECK(format_sig6(1.0 / 3) == "0.333333");
  CHECK(format_sig6(2 * std::sqrt(2.0)) == "2.82843");
  CHECK(format_sig6(1e-20) == "1e-20");
  CHECK(format_sig6(std::numeric_limits<double>::infinity()) == "inf");
}

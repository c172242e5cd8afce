// Copyright 2026 The Actionfield Authors
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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "actionfield/commands.hpp"
#include "actionfield/config.hpp"
#include "actionfield/errors.hpp"
#include "doctest.h"

using namespace actionfield;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

std::string golden(const std::string& name) {
  return first_line(fs::path(AF_GOLDEN_DIR) / name);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "actionfield_test_config" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Small, fast pipeline settings shared by the replay tests.
RunConfig small_config(const fs::path& root) {
  RunConfig c;
  c.set("arch.L", "1");
  c.set("arch.widths", "[8]");
  c.set("arch.D", "2");
  c.set("arch.omega0", "5");
  c.set("arch.G", "2");
  c.set("arch.d", "4");
  c.set("arch.encoder_hidden", "8");
  c.set("data.count", "2");
  c.set("data.H", "10");
  c.set("train.steps", "20");
  c.set("train.lambdas", "[1.0,0.1,0.0,0.0]");
  c.set("sample.K", "21");
  c.set("io.dataset", (root / "data.jsonl").string());
  c.set("io.checkpoint", (root / "train" / "checkpoint.json").string());
  return c;
}

}  // namespace

TEST_CASE("defaults, overrides and errors") {
  RunConfig c;
  CHECK(c.get_int("arch.L") == 3);
  CHECK(c.get_ints("arch.widths") == std::vector<int>{64, 64, 64});
  CHECK(c.get_doubles("train.betas") == std::vector<double>{0.9, 0.95});
  CHECK(c.get_string("train.mode") == "auto_decoder");
  CHECK(c.train().learning_rate == 1e-3);
  CHECK(c.weights().velocity == 0.1);

  c.set("train.mode", "encoder");
  CHECK(c.mode() == TrainMode::kEncoder);
  c.set("sim.Kp", "[100, 200]");
  const SimSettings s = c.sim(2);
  CHECK(s.gains.kp(1) == 200.0);
  CHECK_THROWS_AS(c.sim(3), ConfigError);

  try {
    c.set("train.nope", "1");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "config.unknown_key:train.nope");
  }
  CHECK_THROWS_AS(c.set("arch.L", "\"three\""), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[1,2]"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("{\"bogus\": 1}"), ConfigError);
  try {
    (void)c.require_path("io.dataset");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "config.missing_key:io.dataset");
  }
  for (const std::string& k : RunConfig::keys()) CHECK(RunConfig::is_known(k));
}

TEST_CASE("dump is a complete, re-parsable document") {
  RunConfig c;
  c.set("seed", "42");
  c.set("arch.omega0", "12.5");
  const std::string text = c.dump();
  for (const std::string& k : RunConfig::keys())
    CHECK(text.find("\"" + k + "\"") != std::string::npos);
  const RunConfig back = RunConfig::parse(text);
  CHECK(back.dump() == text);
  CHECK(back.seed() == 42);
  CHECK(back.arch().omega0 == 12.5);
}

TEST_CASE("C2: CSV headers match the golden files") {
  CHECK(profile_csv_header(2, {true, true, true, true}) == golden("profile_D2.csv"));
  CHECK(trace_csv_header(2) == golden("trace_D2.csv"));
  CHECK(std::string(kLossCsvHeader) == golden("loss_history.csv"));
  CHECK(profile_csv_header(1, parse_orders("vel,pos")) == "k,tau,t,pos_0,vel_0");
  CHECK_THROWS_AS(parse_orders("pos,snap"), ConfigError);

  // Files written by the commands carry the same headers.
  const fs::path root = fresh_dir("headers");
  const RunConfig c = small_config(root);
  cmd_generate(c, (root / "gen").string());
  cmd_train(c, (root / "train").string());
  cmd_sample(c, (root / "sample").string());
  cmd_simulate(c, (root / "sim").string());
  CHECK(first_line(root / "train" / "loss_history.csv") == golden("loss_history.csv"));
  CHECK(first_line(root / "sample" / "profile_minjerk-0_K21.csv") == golden("profile_D2.csv"));
  CHECK(first_line(root / "sim" / "trace_impedance_minjerk-0.csv") == golden("trace_D2.csv"));
}

TEST_CASE("C1: every command replays from its config echo") {
  const fs::path root = fresh_dir("replay");
  RunConfig c = small_config(root);
  c.set("simulate.controller", "position");

  struct Step {
    const char* name;
    OutputList (*run)(const RunConfig&, const std::string&);
  };
  const Step steps[] = {{"generate", cmd_generate}, {"train", cmd_train}, {"sample", cmd_sample},
                        {"simulate", cmd_simulate}, {"compare", cmd_compare}};
  for (const Step& s : steps) {
    const fs::path first = root / s.name;
    const OutputList outs = s.run(c, first.string());
    const fs::path echo = first / (std::string(s.name) + ".config.json");
    REQUIRE(fs::exists(echo));
    const RunConfig replayed = RunConfig::load(echo.string());
    CHECK(replayed.dump() == c.dump());

    const fs::path second = root / (std::string(s.name) + "_replay");
    const OutputList again = s.run(replayed, second.string());
    REQUIRE(again.size() == outs.size());
    for (const std::string& o : outs) {
      const fs::path rel = fs::relative(o, first);
      if (rel.string().rfind("..", 0) == 0) continue;  // written outside the run directory
      INFO(s.name << ": " << rel.string());
      CHECK(slurp(o) == slurp(second / rel));
    }
  }
}

TEST_CASE("command input errors") {
  const fs::path root = fresh_dir("errors");
  RunConfig c;
  try {
    cmd_train(c, root.string());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()) == "config.missing_key:io.dataset");
  }
  RunConfig s = small_config(root);
  cmd_generate(s, (root / "gen").string());
  cmd_train(s, (root / "train").string());
  s.set("sample.chunk", "\"not-a-chunk\"");
  CHECK_THROWS_AS(cmd_sample(s, (root / "sample").string()), DataError);
}

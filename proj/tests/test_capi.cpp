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

// Exercises the shared library through its C header only, plus the CLI
// binary as a subprocess.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "actionfield/actionfield.h"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "actionfield_test_capi" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Exit status of the CLI with `args`; stderr goes to `err_file`.
int cli(const std::string& args, const fs::path& err_file) {
  const std::string cmd = std::string("\"") + AF_CLI_PATH + "\" " + args + " > /dev/null 2> \"" +
                          err_file.string() + "\"";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

struct Config {
  af_config* handle = nullptr;
  Config() { REQUIRE(af_config_create(&handle) == AF_OK); }
  ~Config() { af_config_free(handle); }
  void set(const char* k, const std::string& v) { REQUIRE(af_config_set(handle, k, v.c_str()) == AF_OK); }
};

void small_setup(Config& c, const fs::path& root) {
  c.set("arch.L", "1");
  c.set("arch.widths", "[8]");
  c.set("arch.D", "2");
  c.set("arch.omega0", "5");
  c.set("arch.G", "2");
  c.set("arch.d", "4");
  c.set("data.count", "2");
  c.set("train.steps", "15");
  c.set("io.dataset", "\"" + (root / "data.jsonl").string() + "\"");
  c.set("io.checkpoint", "\"" + (root / "train" / "checkpoint.json").string() + "\"");
}

}  // namespace

TEST_CASE("config handle and error reporting") {
  CHECK(std::string(af_version()) == "1.0.0");
  Config c;
  size_t needed = 0;
  REQUIRE(af_config_dump(c.handle, nullptr, 0, &needed) == AF_OK);
  CHECK(needed > 100);
  std::vector<char> buf(needed);
  REQUIRE(af_config_dump(c.handle, buf.data(), buf.size(), nullptr) == AF_OK);
  CHECK(std::string(buf.data()).size() == needed - 1);
  char tiny[8];
  REQUIRE(af_config_dump(c.handle, tiny, sizeof tiny, nullptr) == AF_OK);
  CHECK(std::string(tiny).size() == 7);

  CHECK(af_config_set(c.handle, "no.such.key", "1") == AF_ERR_CONFIG);
  CHECK(std::string(af_last_error()) == "config.unknown_key:no.such.key");
  CHECK(af_cmd_train(c.handle, fresh_dir("err").string().c_str()) == AF_ERR_CONFIG);
  CHECK(std::string(af_last_error()) == "config.missing_key:io.dataset");

  af_config* loaded = nullptr;
  CHECK(af_config_load("/nonexistent/config.json", &loaded) == AF_ERR_CONFIG);
  af_model* m = nullptr;
  CHECK(af_model_load("/nonexistent/checkpoint.json", &m) != AF_OK);
  CHECK(m == nullptr);
}

TEST_CASE("pipeline through the C API; shared tau samples are identical") {
  const fs::path root = fresh_dir("pipeline");
  Config c;
  small_setup(c, root);
  REQUIRE(af_cmd_generate(c.handle, (root / "gen").string().c_str()) == AF_OK);
  REQUIRE(af_cmd_train(c.handle, (root / "train").string().c_str()) == AF_OK);

  af_model* m = nullptr;
  REQUIRE(af_model_load((root / "train" / "checkpoint.json").string().c_str(), &m) == AF_OK);
  CHECK(af_model_action_dim(m) == 2);
  CHECK(af_model_chunk_count(m) == 2);
  CHECK(std::string(af_model_chunk_id(m, 1)) == "minjerk-1");
  CHECK(af_model_chunk_id(m, 2) == nullptr);

  const int D = 2;
  std::vector<double> p51(51 * D), v51(51 * D), p201(201 * D), v201(201 * D);
  REQUIRE(af_model_sample(m, 0, 51, 0.0, p51.data(), v51.data(), nullptr, nullptr) == AF_OK);
  REQUIRE(af_model_sample(m, 0, 201, 0.0, p201.data(), v201.data(), nullptr, nullptr) == AF_OK);
  for (int k = 0; k < 51; ++k)
    for (int d = 0; d < D; ++d) {
      CHECK(p51[k * D + d] == p201[4 * k * D + d]);
      CHECK(v51[k * D + d] == v201[4 * k * D + d]);
    }

  // Raw eval at tau = -1 and 1 matches the first/last samples; velocity is
  // scaled by 2/T in sample but not in eval.
  const double tau[2] = {-1.0, 1.0};
  std::vector<double> raw(2 * 2 * D);
  REQUIRE(af_model_eval(m, 0, tau, 2, 1, raw.data()) == AF_OK);
  CHECK(raw[0] == p51[0]);
  CHECK(raw[D + 1] == p51[50 * D + 1]);
  CHECK(raw[2 * D] * (2.0 / 2.0) == doctest::Approx(v51[0]).epsilon(1e-15));
  std::vector<double> v51_t4(51 * D);
  REQUIRE(af_model_sample(m, 0, 51, 4.0, nullptr, v51_t4.data(), nullptr, nullptr) == AF_OK);
  CHECK(v51_t4[10] == doctest::Approx(0.5 * v51[10]).epsilon(1e-14));

  CHECK(af_model_sample(m, 5, 51, 0.0, p51.data(), nullptr, nullptr, nullptr) == AF_ERR_DATA);
  CHECK(af_model_sample(m, 0, 1, 0.0, p51.data(), nullptr, nullptr, nullptr) == AF_ERR_CONFIG);
  CHECK(af_model_eval(m, 0, tau, 2, 4, raw.data()) == AF_ERR_CONFIG);
  af_model_free(m);
}

TEST_CASE("CLI exit codes and deterministic outputs") {
  const fs::path root = fresh_dir("cli");
  const fs::path err = root / "stderr.txt";
  CHECK(cli("--version", err) == 0);
  CHECK(cli("", err) != 0);
  CHECK(cli("train --out \"" + root.string() + "\"", err) == 1);
  CHECK(slurp(err).find("config.missing_key:io.dataset") != std::string::npos);
  CHECK(cli("train --set bogus.key=1", err) == 1);
  CHECK(cli("train --set malformed", err) == 1);
  CHECK(slurp(err).find("config.invalid_override:malformed") != std::string::npos);

  const std::string common =
      "--set arch.L=1 --set arch.widths=[8] --set arch.D=2 --set arch.G=2 --set arch.d=4 "
      "--set arch.omega0=5 --set data.count=2 ";
  const std::string data = (root / "data.jsonl").string();
  REQUIRE(cli(common + "--out \"" + (root / "gen").string() + "\" generate --dataset \"" + data + "\"", err) == 0);
  REQUIRE(cli(common + "--out \"" + (root / "train").string() + "\" train --dataset \"" + data +
                  "\" --steps 10", err) == 0);
  const std::string ckpt = (root / "train" / "checkpoint.json").string();
  for (const char* run : {"s1", "s2"}) {
    REQUIRE(cli(common + "--out \"" + (root / run).string() + "\" sample --checkpoint \"" + ckpt +
                    "\" --chunk minjerk-1 --K 33", err) == 0);
  }
  const std::string a = slurp(root / "s1" / "profile_minjerk-1_K33.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(root / "s2" / "profile_minjerk-1_K33.csv"));

  CHECK(cli(common + "--out \"" + (root / "s3").string() + "\" sample --checkpoint \"" + ckpt +
                "\" --chunk nope", err) == 2);
  CHECK(slurp(err).find("data.unknown_chunk") != std::string::npos);
}

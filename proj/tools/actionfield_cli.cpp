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

// actionfield command-line tool. Talks to the library only through the C API.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "actionfield/actionfield.h"

namespace {

struct Handle {
  af_config* cfg = nullptr;
  ~Handle() { af_config_free(cfg); }
};

int report(af_status s) {
  if (s != AF_OK) std::fprintf(stderr, "%s\n", af_last_error());
  return static_cast<int>(s);
}

// Applies "key=value" overrides in order.
af_status apply_overrides(af_config* cfg, const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "config.invalid_override:%s\n", kv.c_str());
      return AF_ERR_CONFIG;
    }
    const af_status s = af_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (s != AF_OK) return s;
  }
  return AF_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous action-chunk fields: generate, train, sample, simulate, compare"};
  app.set_version_flag("--version", af_version());
  app.require_subcommand(1);
  // Global options are accepted before or after the subcommand.
  app.fallthrough();

  std::string config_path;
  long long seed = -1;
  const char* env_out = std::getenv("ACTIONFIELD_OUT");
  std::string out_dir = env_out && *env_out ? env_out : ".";
  std::vector<std::string> sets;

  app.add_option("--config", config_path, "Flat JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Overrides the config seed")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_dir, "Output directory (default: $ACTIONFIELD_OUT or .)");
  app.add_option("--set", sets, "Override one config key: --set key=value (repeatable)");

  // Per-command shorthand flags map onto config keys.
  std::vector<std::string> cmd_sets;
  auto shorthand = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                       const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&cmd_sets, key](const std::string& v) { cmd_sets.push_back(key + "=" + v); },
        help);
  };

  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset (JSONL)");
  shorthand(gen, "--kind", "data.kind", "minjerk | sines | pickplace");
  shorthand(gen, "--count", "data.count", "Number of chunks");
  shorthand(gen, "--dataset", "io.dataset", "Dataset output path");

  auto* train = app.add_subcommand("train", "Fit a field model to a dataset");
  shorthand(train, "--dataset", "io.dataset", "Dataset path");
  shorthand(train, "--steps", "train.steps", "Optimizer steps");
  shorthand(train, "--mode", "train.mode", "auto_decoder | encoder");
  shorthand(train, "--activation", "train.activation", "sine | relu");

  auto* sample = app.add_subcommand("sample", "Sample a trained chunk on a K-point grid");
  shorthand(sample, "--checkpoint", "io.checkpoint", "Checkpoint path");
  shorthand(sample, "--chunk", "sample.chunk", "Chunk id (default: first)");
  shorthand(sample, "--K", "sample.K", "Number of samples");
  shorthand(sample, "--T", "sample.T", "Duration in seconds (0: chunk duration)");
  shorthand(sample, "--orders", "sample.orders", "Subset of pos,vel,acc,jerk");

  auto* sim = app.add_subcommand("simulate", "Roll out a controller on the simulated plant");
  shorthand(sim, "--checkpoint", "io.checkpoint", "Checkpoint path");
  shorthand(sim, "--dataset", "io.dataset", "Dataset path (position controller)");
  shorthand(sim, "--chunk", "simulate.chunk", "Chunk id (default: first)");
  shorthand(sim, "--controller", "simulate.controller", "impedance | position");

  auto* cmp = app.add_subcommand("compare", "Compare action representations and controllers");
  shorthand(cmp, "--checkpoint", "io.checkpoint", "Checkpoint path");
  shorthand(cmp, "--dataset", "io.dataset", "Dataset path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "config.cli:%s\n", e.what());
    return AF_ERR_CONFIG;
  }

  Handle h;
  af_status s = config_path.empty() ? af_config_create(&h.cfg)
                                    : af_config_load(config_path.c_str(), &h.cfg);
  if (s != AF_OK) return report(s);
  if (seed >= 0) {
    s = af_config_set(h.cfg, "seed", std::to_string(seed).c_str());
    if (s != AF_OK) return report(s);
  }
  s = apply_overrides(h.cfg, sets);
  if (s == AF_OK) s = apply_overrides(h.cfg, cmd_sets);
  if (s != AF_OK) return af_last_error()[0] ? report(s) : static_cast<int>(s);

  if (gen->parsed()) s = af_cmd_generate(h.cfg, out_dir.c_str());
  else if (train->parsed()) s = af_cmd_train(h.cfg, out_dir.c_str());
  else if (sample->parsed()) s = af_cmd_sample(h.cfg, out_dir.c_str());
  else if (sim->parsed()) s = af_cmd_simulate(h.cfg, out_dir.c_str());
  else s = af_cmd_compare(h.cfg, out_dir.c_str());
  return report(s);
}

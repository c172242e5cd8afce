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

#pragma once

// Flat key-value run configuration. Keys are dotted names ("train.lr");
// values are JSON scalars or arrays. Every key has a documented default and
// unknown keys are rejected.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "actionfield/model.hpp"
#include "actionfield/simctl.hpp"
#include "actionfield/train.hpp"

namespace actionfield {

struct SimSettings {
  double dt = 1e-3;
  ControllerTiming timing;
  double mass = 1.0;
  double damping = 0.5;
  ImpedanceGains gains;
};

class RunConfig {
 public:
  RunConfig();

  // Reads a flat JSON object; keys not in the default table are rejected.
  static RunConfig load(const std::string& path);
  static RunConfig parse(const std::string& text);

  static const std::vector<std::string>& keys();
  static bool is_known(const std::string& key);

  // `value` is JSON text; bare words are accepted as strings.
  void set(const std::string& key, const std::string& value);

  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<int> get_ints(const std::string& key) const;

  // Throws "config.missing_key:<key>" when the path is empty.
  std::string require_path(const std::string& key) const;

  std::uint64_t seed() const;
  ModelArch arch() const;
  TrainConfig train() const;
  TrainMode mode() const;
  LossWeights weights() const;
  SimSettings sim(int dof) const;

  // Fully resolved document, keys sorted, one per line.
  std::string dump() const;

 private:
  std::map<std::string, std::string> values_;  // key -> JSON text
};

}  // namespace actionfield

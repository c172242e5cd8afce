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

#include "actionfield/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "actionfield/errors.hpp"
#include "json.hpp"

namespace actionfield {

using nlohmann::json;

namespace {

enum class Kind { kNumber, kInteger, kString, kBool, kNumberList, kIntList, kNumberOrList };

struct KeySpec {
  const char* key;
  const char* fallback;  // JSON text
  Kind kind;
};

// Every recognized key and its default.
constexpr KeySpec kSpecs[] = {
    {"seed", "0", Kind::kInteger},

    {"arch.L", "3", Kind::kInteger},
    {"arch.widths", "[64,64,64]", Kind::kIntList},
    {"arch.D", "7", Kind::kInteger},
    {"arch.omega0", "30.0", Kind::kNumber},
    {"arch.G", "64", Kind::kInteger},
    {"arch.d", "32", Kind::kInteger},
    {"arch.head_hidden", "0", Kind::kInteger},
    {"arch.encoder_hidden", "64", Kind::kInteger},

    {"train.lr", "0.001", Kind::kNumber},
    {"train.betas", "[0.9,0.95]", Kind::kNumberList},
    {"train.eps", "1e-08", Kind::kNumber},
    {"train.weight_decay", "0.0", Kind::kNumber},
    {"train.steps", "2000", Kind::kInteger},
    {"train.batch", "8", Kind::kInteger},
    {"train.lambdas", "[1.0,0.1,0.01,0.001]", Kind::kNumberList},
    {"train.activation", "\"sine\"", Kind::kString},
    {"train.mode", "\"auto_decoder\"", Kind::kString},
    {"train.optimizer", "\"adamw\"", Kind::kString},
    {"train.jerk_grid", "0", Kind::kInteger},

    {"data.kind", "\"minjerk\"", Kind::kString},
    {"data.count", "4", Kind::kInteger},
    {"data.H", "10", Kind::kInteger},
    {"data.T", "2.0", Kind::kNumber},
    {"data.anchor", "true", Kind::kBool},

    {"sim.dt", "0.001", Kind::kNumber},
    {"sim.controller_hz", "50.0", Kind::kNumber},
    {"sim.Kp", "400.0", Kind::kNumberOrList},
    {"sim.Kd", "8.0", Kind::kNumberOrList},
    {"sim.mass", "1.0", Kind::kNumber},
    {"sim.damping", "0.5", Kind::kNumber},
    {"sim.critically_damped", "false", Kind::kBool},

    {"sample.chunk", "\"\"", Kind::kString},
    {"sample.K", "50", Kind::kInteger},
    {"sample.T", "0.0", Kind::kNumber},
    {"sample.orders", "\"pos,vel,acc,jerk\"", Kind::kString},
    {"sample.svg", "true", Kind::kBool},

    {"simulate.chunk", "\"\"", Kind::kString},
    {"simulate.controller", "\"impedance\"", Kind::kString},
    {"simulate.bins", "256", Kind::kInteger},

    {"compare.bins", "256", Kind::kInteger},
    {"compare.upsample", "4", Kind::kInteger},
    {"compare.max_chunks", "8", Kind::kInteger},
    {"compare.bspline_points", "0", Kind::kInteger},

    {"io.dataset", "\"\"", Kind::kString},
    {"io.checkpoint", "\"\"", Kind::kString},
};

const KeySpec* find_spec(const std::string& key) {
  for (const auto& s : kSpecs)
    if (key == s.key) return &s;
  return nullptr;
}

bool matches(const json& v, Kind kind) {
  auto all = [&](auto pred) {
    return v.is_array() && std::all_of(v.begin(), v.end(), pred);
  };
  switch (kind) {
    case Kind::kNumber: return v.is_number();
    case Kind::kInteger: return v.is_number_integer();
    case Kind::kString: return v.is_string();
    case Kind::kBool: return v.is_boolean();
    case Kind::kNumberList: return all([](const json& e) { return e.is_number(); });
    case Kind::kIntList: return all([](const json& e) { return e.is_number_integer(); });
    case Kind::kNumberOrList:
      return v.is_number() || all([](const json& e) { return e.is_number(); });
  }
  return false;
}

json value_of(const std::map<std::string, std::string>& values, const std::string& key) {
  const auto it = values.find(key);
  if (it == values.end()) throw ConfigError("config.unknown_key:" + key);
  return json::parse(it->second);
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& s : kSpecs) values_[s.key] = json::parse(s.fallback).dump();
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& s : kSpecs) out.emplace_back(s.key);
    return out;
  }();
  return k;
}

bool RunConfig::is_known(const std::string& key) { return find_spec(key) != nullptr; }

RunConfig RunConfig::parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error&) {
    throw ConfigError("config.malformed");
  }
  if (!doc.is_object()) throw ConfigError("config.malformed:not_an_object");
  RunConfig cfg;
  for (const auto& [key, value] : doc.items()) cfg.set(key, value.dump());
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config.unreadable:" + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const KeySpec* spec = find_spec(key);
  if (!spec) throw ConfigError("config.unknown_key:" + key);
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;  // bare word
  }
  if (spec->kind == Kind::kNumber && v.is_number_integer()) v = v.get<double>();
  if (spec->kind == Kind::kString && !v.is_string()) v = value;
  if (!matches(v, spec->kind)) throw ConfigError("config.invalid:" + key);
  values_[key] = v.dump();
}

double RunConfig::get_double(const std::string& key) const {
  return value_of(values_, key).get<double>();
}
int RunConfig::get_int(const std::string& key) const {
  return value_of(values_, key).get<int>();
}
bool RunConfig::get_bool(const std::string& key) const {
  return value_of(values_, key).get<bool>();
}
std::string RunConfig::get_string(const std::string& key) const {
  return value_of(values_, key).get<std::string>();
}
std::vector<double> RunConfig::get_doubles(const std::string& key) const {
  const json v = value_of(values_, key);
  if (v.is_number()) return {v.get<double>()};
  return v.get<std::vector<double>>();
}
std::vector<int> RunConfig::get_ints(const std::string& key) const {
  return value_of(values_, key).get<std::vector<int>>();
}

std::string RunConfig::require_path(const std::string& key) const {
  const std::string p = get_string(key);
  if (p.empty()) throw ConfigError("config.missing_key:" + key);
  return p;
}

std::uint64_t RunConfig::seed() const {
  const int s = get_int("seed");
  if (s < 0) throw ConfigError("config.invalid:seed");
  return static_cast<std::uint64_t>(s);
}

ModelArch RunConfig::arch() const {
  ModelArch a;
  a.depth = get_int("arch.L");
  a.widths = get_ints("arch.widths");
  a.action_dim = get_int("arch.D");
  a.omega0 = get_double("arch.omega0");
  a.groups = get_int("arch.G");
  a.latent_dim = get_int("arch.d");
  a.head_hidden = get_int("arch.head_hidden");
  a.encoder_hidden = get_int("arch.encoder_hidden");
  a.activation = parse_activation(get_string("train.activation"));
  if (!(a.omega0 > 0.0)) throw ConfigError("config.invalid:arch.omega0");
  a.validate();
  return a;
}

TrainConfig RunConfig::train() const {
  TrainConfig t;
  t.learning_rate = get_double("train.lr");
  const auto betas = get_doubles("train.betas");
  if (betas.size() != 2) throw ConfigError("config.invalid:train.betas");
  t.beta1 = betas[0];
  t.beta2 = betas[1];
  t.epsilon = get_double("train.eps");
  t.weight_decay = get_double("train.weight_decay");
  t.steps = get_int("train.steps");
  t.batch_size = get_int("train.batch");
  t.seed = seed();
  t.activation = parse_activation(get_string("train.activation"));
  const std::string opt = get_string("train.optimizer");
  if (opt == "adamw") t.optimizer = Optimizer::kAdamW;
  else if (opt == "sgd") t.optimizer = Optimizer::kSgd;
  else throw ConfigError("config.invalid:train.optimizer");
  t.jerk_grid = get_int("train.jerk_grid");
  t.validate();
  return t;
}

TrainMode RunConfig::mode() const { return parse_mode(get_string("train.mode")); }

LossWeights RunConfig::weights() const {
  const auto l = get_doubles("train.lambdas");
  if (l.size() != 4) throw ConfigError("config.invalid:train.lambdas");
  LossWeights w{l[0], l[1], l[2], l[3]};
  w.validate();
  return w;
}

SimSettings RunConfig::sim(int dof) const {
  SimSettings s;
  s.dt = get_double("sim.dt");
  s.timing.controller_hz = get_double("sim.controller_hz");
  s.mass = get_double("sim.mass");
  s.damping = get_double("sim.damping");
  auto per_dof = [&](const std::string& key) {
    const auto v = get_doubles(key);
    if (v.size() == 1) return Eigen::VectorXd::Constant(dof, v[0]).eval();
    if (static_cast<int>(v.size()) != dof) throw ConfigError("config.invalid:" + key + ":dof");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), dof).eval();
  };
  s.gains.kp = per_dof("sim.Kp");
  s.gains.kd = per_dof("sim.Kd");
  if (get_bool("sim.critically_damped"))
    s.gains = ImpedanceGains::critically_damped(s.gains.kp, Eigen::VectorXd::Constant(dof, s.mass));
  return s;
}

std::string RunConfig::dump() const {
  std::string out = "{\n";
  bool first = true;
  for (const auto& [k, v] : values_) {
    if (!first) out += ",\n";
    first = false;
    out += "  " + json(k).dump() + ": " + v;
  }
  out += "\n}\n";
  return out;
}

}  // namespace actionfield

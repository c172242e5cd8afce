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

#include "actionfield/actionfield.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "actionfield/commands.hpp"
#include "actionfield/config.hpp"
#include "actionfield/errors.hpp"
#include "actionfield/model.hpp"

struct af_config {
  actionfield::RunConfig cfg;
};

struct af_model {
  actionfield::Model model;
};

namespace {

thread_local std::string g_last_error;

af_status fail(af_status s, std::string reason) {
  g_last_error = std::move(reason);
  return s;
}

template <typename F>
af_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return AF_OK;
  } catch (const actionfield::Error& e) {
    return fail(static_cast<af_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(AF_ERR_INTERNAL, "internal.out_of_memory");
  } catch (const std::exception& e) {
    return fail(AF_ERR_INTERNAL, std::string("internal.unexpected:") + e.what());
  } catch (...) {
    return fail(AF_ERR_INTERNAL, "internal.unknown");
  }
}

af_status run_command(const af_config* cfg, const char* out_dir,
                      actionfield::OutputList (*cmd)(const actionfield::RunConfig&,
                                                     const std::string&)) {
  if (!cfg) return fail(AF_ERR_INTERNAL, "internal.null_handle");
  return guarded([&] { cmd(cfg->cfg, out_dir ? out_dir : "."); });
}

bool valid_chunk(const af_model* m, int index) {
  return m && index >= 0 && index < static_cast<int>(m->model.chunks.size());
}

void copy_rows(const Eigen::MatrixXd& src, double* dst) {
  // src is K x D column-major; dst is row-major.
  for (Eigen::Index k = 0; k < src.rows(); ++k)
    for (Eigen::Index d = 0; d < src.cols(); ++d) dst[k * src.cols() + d] = src(k, d);
}

}  // namespace

extern "C" {

const char* af_version(void) { return "1.0.0"; }

const char* af_last_error(void) { return g_last_error.c_str(); }

af_status af_config_create(af_config** out) {
  if (!out) return fail(AF_ERR_INTERNAL, "internal.null_handle");
  return guarded([&] { *out = new af_config{}; });
}

af_status af_config_load(const char* path, af_config** out) {
  if (!out || !path) return fail(AF_ERR_INTERNAL, "internal.null_handle");
  return guarded([&] { *out = new af_config{actionfield::RunConfig::load(path)}; });
}

af_status af_config_set(af_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(AF_ERR_INTERNAL, "internal.null_handle");
  return guarded([&] { cfg->cfg.set(key, value); });
}

af_status af_config_dump(const af_config* cfg, char* buf, size_t buf_size, size_t* needed) {
  if (!cfg) return fail(AF_ERR_INTERNAL, "internal.null_handle");
  return guarded([&] {
    const std::string text = cfg->cfg.dump();
    if (needed) *needed = text.size() + 1;
    if (buf && buf_size > 0) {
      const size_t n = std::min(buf_size - 1, text.size());
      std::memcpy(buf, text.data(), n);
      buf[n] = '\0';
    }
  });
}

void af_config_free(af_config* cfg) { delete cfg; }

af_status af_cmd_generate(const af_config* cfg, const char* out_dir) {
  return run_command(cfg, out_dir, actionfield::cmd_generate);
}
af_status af_cmd_train(const af_config* cfg, const char* out_dir) {
  return run_command(cfg, out_dir, actionfield::cmd_train);
}
af_status af_cmd_sample(const af_config* cfg, const char* out_dir) {
  return run_command(cfg, out_dir, actionfield::cmd_sample);
}
af_status af_cmd_simulate(const af_config* cfg, const char* out_dir) {
  return run_command(cfg, out_dir, actionfield::cmd_simulate);
}
af_status af_cmd_compare(const af_config* cfg, const char* out_dir) {
  return run_command(cfg, out_dir, actionfield::cmd_compare);
}

af_status af_model_load(const char* checkpoint_path, af_model** out) {
  if (!out || !checkpoint_path) return fail(AF_ERR_INTERNAL, "internal.null_handle");
  return guarded([&] { *out = new af_model{actionfield::load_checkpoint(checkpoint_path)}; });
}

void af_model_free(af_model* model) { delete model; }

int af_model_action_dim(const af_model* model) {
  return model ? model->model.arch.action_dim : 0;
}

int af_model_chunk_count(const af_model* model) {
  return model ? static_cast<int>(model->model.chunks.size()) : 0;
}

const char* af_model_chunk_id(const af_model* model, int index) {
  if (!valid_chunk(model, index)) return nullptr;
  return model->model.chunks[index].id.c_str();
}

af_status af_model_sample(const af_model* model, int index, int K, double T, double* position,
                          double* velocity, double* acceleration, double* jerk) {
  if (!valid_chunk(model, index)) return fail(AF_ERR_DATA, "data.unknown_chunk_index");
  return guarded([&] {
    const double duration = T > 0.0 ? T : model->model.chunks[index].duration;
    const actionfield::DerivativeOrders orders{position != nullptr, velocity != nullptr,
                                               acceleration != nullptr, jerk != nullptr};
    if (!(orders.position || orders.velocity || orders.acceleration || orders.jerk)) return;
    const auto p =
        actionfield::sample_chunk(model->model.field_for(index), K, duration, orders);
    if (position) copy_rows(*p.position, position);
    if (velocity) copy_rows(*p.velocity, velocity);
    if (acceleration) copy_rows(*p.acceleration, acceleration);
    if (jerk) copy_rows(*p.jerk, jerk);
  });
}

af_status af_model_eval(const af_model* model, int index, const double* tau, int n, int order,
                        double* out) {
  if (!valid_chunk(model, index)) return fail(AF_ERR_DATA, "data.unknown_chunk_index");
  if (!tau || !out || n < 0) return fail(AF_ERR_INTERNAL, "internal.null_handle");
  if (order < 0 || order > 3) return fail(AF_ERR_CONFIG, "config.invalid:order");
  return guarded([&] {
    const auto jet = actionfield::eval_jet(model->model.field_for(index),
                                           std::span<const double>(tau, n), order);
    const int dof = model->model.arch.action_dim;
    for (int o = 0; o <= order; ++o)
      copy_rows(jet.derivs[o].transpose(), out + static_cast<size_t>(o) * n * dof);
  });
}

}  // extern "C"

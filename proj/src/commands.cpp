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

#include "actionfield/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "actionfield/baselines.hpp"
#include "actionfield/errors.hpp"
#include "actionfield/svg.hpp"
#include "actionfield/train.hpp"
#include "json.hpp"

namespace actionfield {

namespace fs = std::filesystem;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::string prepare_dir(const std::string& out_dir) {
  const std::string dir = out_dir.empty() ? "." : out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("io.unwritable:" + dir);
  return dir;
}

std::string echo_config(const RunConfig& cfg, const std::string& dir, const char* cmd) {
  const std::string path = (fs::path(dir) / (std::string(cmd) + ".config.json")).string();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("io.unwritable:" + path);
  out << cfg.dump();
  return path;
}

int pick_chunk(const Model& model, const std::string& id) {
  if (model.chunks.empty()) throw DataError("data.checkpoint_has_no_chunks");
  if (id.empty()) return 0;
  const int idx = model.chunk_index(id);
  if (idx < 0) throw DataError("data.unknown_chunk:" + id);
  return idx;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> column(const MatrixXd& m, int col) {
  return {m.col(col).data(), m.col(col).data() + m.rows()};
}

void plot_trace(const std::string& path, const ControlTrace& t) {
  std::vector<PlotPanel> panels;
  const int dof = static_cast<int>(t.position.cols());
  for (int d = 0; d < std::min(dof, 2); ++d) {
    panels.push_back({"position dof " + std::to_string(d),
                      {{"reference", t.time, column(t.ref_position, d), "#d62728", true},
                       {"actual", t.time, column(t.position, d), "#1f77b4", false}}});
    panels.push_back({"velocity dof " + std::to_string(d),
                      {{"reference", t.time, column(t.ref_velocity, d), "#d62728", true},
                       {"actual", t.time, column(t.velocity, d), "#1f77b4", false}}});
  }
  write_svg(path, panels);
}

}  // namespace

DerivativeOrders parse_orders(const std::string& text) {
  DerivativeOrders o{false, false, false, false};
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "pos") o.position = true;
    else if (tok == "vel") o.velocity = true;
    else if (tok == "acc") o.acceleration = true;
    else if (tok == "jerk") o.jerk = true;
    else throw ConfigError("config.invalid:sample.orders:" + tok);
  }
  if (!(o.position || o.velocity || o.acceleration || o.jerk))
    throw ConfigError("config.invalid:sample.orders:empty");
  return o;
}

std::string profile_csv_header(int dof, DerivativeOrders orders) {
  std::string h = "k,tau,t";
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    for (int d = 0; d < dof; ++d) h += "," + std::string(name) + "_" + std::to_string(d);
  };
  add(orders.position, "pos");
  add(orders.velocity, "vel");
  add(orders.acceleration, "acc");
  add(orders.jerk, "jerk");
  return h;
}

void write_profile_csv(const std::string& path, const KinematicProfile& p) {
  const DerivativeOrders orders{p.position.has_value(), p.velocity.has_value(),
                                p.acceleration.has_value(), p.jerk.has_value()};
  int dof = 0;
  for (const auto* m : {&p.position, &p.velocity, &p.acceleration, &p.jerk})
    if (m->has_value()) dof = static_cast<int>((*m)->cols());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("io.unwritable:" + path);
  out << profile_csv_header(dof, orders) << '\n';
  for (std::size_t k = 0; k < p.tau.size(); ++k) {
    out << k << ',' << fmt17(p.tau[k]) << ',' << fmt17(0.5 * (p.tau[k] + 1.0) * p.duration);
    for (const auto* m : {&p.position, &p.velocity, &p.acceleration, &p.jerk}) {
      if (!m->has_value()) continue;
      for (int d = 0; d < dof; ++d) out << ',' << fmt17((**m)(k, d));
    }
    out << '\n';
  }
}

OutputList cmd_generate(const RunConfig& cfg, const std::string& out_dir) {
  const std::string dir = prepare_dir(out_dir);
  const auto records = generate_dataset(parse_task(cfg.get_string("data.kind")),
                                        cfg.get_int("data.count"), cfg.get_int("arch.D"),
                                        cfg.get_int("data.H"), cfg.get_double("data.T"),
                                        cfg.seed(), cfg.get_bool("data.anchor"));
  std::string path = cfg.get_string("io.dataset");
  if (path.empty()) path = (fs::path(dir) / "dataset.jsonl").string();
  write_dataset(path, records);
  return {path, echo_config(cfg, dir, "generate")};
}

OutputList cmd_train(const RunConfig& cfg, const std::string& out_dir) {
  const std::string data_path = cfg.require_path("io.dataset");
  const ModelArch arch = cfg.arch();
  const TrainConfig tc = cfg.train();
  const LossWeights w = cfg.weights();
  const TrainMode mode = cfg.mode();
  const auto dataset = read_dataset(data_path);
  if (dataset.empty()) throw DataError("data.empty_dataset:" + data_path);
  const std::string dir = prepare_dir(out_dir);
  const FitResult r = fit(dataset, tc, w, mode, arch);
  const std::string ckpt = (fs::path(dir) / "checkpoint.json").string();
  const std::string hist = (fs::path(dir) / "loss_history.csv").string();
  save_checkpoint(ckpt, r.model);
  write_loss_history(hist, r.history);
  return {ckpt, hist, echo_config(cfg, dir, "train")};
}

OutputList cmd_sample(const RunConfig& cfg, const std::string& out_dir) {
  const Model model = load_checkpoint(cfg.require_path("io.checkpoint"));
  const int idx = pick_chunk(model, cfg.get_string("sample.chunk"));
  const int count = cfg.get_int("sample.K");
  double duration = cfg.get_double("sample.T");
  if (duration == 0.0) duration = model.chunks[idx].duration;
  const DerivativeOrders orders = parse_orders(cfg.get_string("sample.orders"));
  const std::string dir = prepare_dir(out_dir);

  const KinematicProfile p = sample_chunk(model.field_for(idx), count, duration, orders);
  const std::string stem = "profile_" + model.chunks[idx].id + "_K" + std::to_string(count);
  OutputList outputs;
  outputs.push_back((fs::path(dir) / (stem + ".csv")).string());
  write_profile_csv(outputs.back(), p);
  if (cfg.get_bool("sample.svg")) {
    std::vector<double> t;
    for (double tau : p.tau) t.push_back(0.5 * (tau + 1.0) * duration);
    std::vector<PlotPanel> panels;
    auto add = [&](const std::optional<MatrixXd>& m, const char* title) {
      if (!m) return;
      PlotPanel panel{title, {}};
      const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
      for (int d = 0; d < m->cols(); ++d)
        panel.series.push_back({"dof " + std::to_string(d), t, column(*m, d), colors[d % 8], false});
      panels.push_back(std::move(panel));
    };
    add(p.position, "position");
    add(p.velocity, "velocity");
    add(p.acceleration, "acceleration");
    add(p.jerk, "jerk");
    outputs.push_back((fs::path(dir) / (stem + ".svg")).string());
    write_svg(outputs.back(), panels);
  }
  outputs.push_back(echo_config(cfg, dir, "sample"));
  return outputs;
}

OutputList cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
  const Model model = load_checkpoint(cfg.require_path("io.checkpoint"));
  const int idx = pick_chunk(model, cfg.get_string("simulate.chunk"));
  const std::string controller = cfg.get_string("simulate.controller");
  if (controller != "impedance" && controller != "position")
    throw ConfigError("config.invalid:simulate.controller:" + controller);
  const int dof = model.arch.action_dim;
  const SimSettings sim = cfg.sim(dof);
  Plant plant = make_plant(dof, sim.mass, sim.damping, sim.dt);
  const ChunkSlot& slot = model.chunks[idx];
  const int steps = static_cast<int>(std::floor(slot.duration / sim.dt + 1e-9));

  ControlTrace trace;
  if (controller == "impedance") {
    const ModulatedField field = model.field_for(idx);
    const double tau[1] = {-1.0};
    const FieldJet jet = eval_jet(field, tau, 1);
    plant.position = jet.derivs[0].col(0);
    plant.velocity = (2.0 / slot.duration) * jet.derivs[1].col(0);
    trace = run_impedance(plant, field, sim.gains, slot.duration, steps, sim.timing);
  } else {
    const auto dataset = read_dataset(cfg.require_path("io.dataset"));
    const ChunkRecord* rec = nullptr;
    for (const auto& r : dataset)
      if (r.id == slot.id) rec = &r;
    if (!rec) throw DataError("data.unknown_chunk:" + slot.id);
    WaypointChunk wp = waypoints_from(*rec);
    const int bins = cfg.get_int("simulate.bins");
    if (bins > 0) wp = quantize(wp, bins);
    plant.position = wp.points.row(0).transpose();
    trace = run_position_ctrl(plant, wp, sim.gains, steps, sim.timing);
  }
  if (trace.aborted) throw DivergenceError(trace.abort_reason);

  const std::string dir = prepare_dir(out_dir);
  const std::string stem = "trace_" + controller + "_" + slot.id;
  OutputList outputs;
  outputs.push_back((fs::path(dir) / (stem + ".csv")).string());
  write_trace_csv(outputs.back(), trace);
  outputs.push_back((fs::path(dir) / (stem + ".svg")).string());
  plot_trace(outputs.back(), trace);
  outputs.push_back(echo_config(cfg, dir, "simulate"));
  return outputs;
}

namespace {

double rmse(const MatrixXd& a, const MatrixXd& b) {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

// Rows 0, u, 2u, ... of an upsampled series.
MatrixXd every_nth(const MatrixXd& m, int n) {
  MatrixXd out((m.rows() - 1) / n + 1, m.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = m.row(i * n);
  return out;
}

void accumulate(RepresentationRow& acc, const RepresentationRow& r, double s) {
  acc.position_rmse += s * r.position_rmse;
  acc.velocity_rmse += s * r.velocity_rmse;
  acc.upsample_velocity_rmse += s * r.upsample_velocity_rmse;
  acc.upsample_jerk_rms += s * r.upsample_jerk_rms;
}

void accumulate(JitterMetrics& acc, const JitterMetrics& m, double s) {
  acc.vel_zero_crossing_rate += s * m.vel_zero_crossing_rate;
  acc.jerk_rms += s * m.jerk_rms;
  acc.tracking_rmse += s * m.tracking_rmse;
  acc.hf_energy_ratio += s * m.hf_energy_ratio;
}

RepresentationRow waypoint_row(const std::string& name, const WaypointChunk& wp,
                               const WaypointChunk& up, const ChunkRecord& rec, int u) {
  RepresentationRow r{name};
  r.position_rmse = rmse(wp.points, rec.positions);
  r.velocity_rmse = rmse(fd_velocity(wp), *rec.velocities);
  const MatrixXd vel_up = fd_velocity(up);
  r.upsample_velocity_rmse = rmse(every_nth(vel_up, u), *rec.velocities);
  r.upsample_jerk_rms = velocity_jitter(vel_up, up.spacing()).jerk_rms;
  return r;
}

}  // namespace

CompareReport compare_representations(const Model& model, std::span<const ChunkRecord> dataset,
                                      const RunConfig& cfg) {
  CompareReport report;
  report.upsample = cfg.get_int("compare.upsample");
  report.bins = cfg.get_int("compare.bins");
  if (report.upsample < 1) throw ConfigError("config.invalid:compare.upsample");
  const int max_chunks = cfg.get_int("compare.max_chunks");
  const int dof = model.arch.action_dim;
  const SimSettings sim = cfg.sim(dof);
  const int u = report.upsample;

  std::vector<const ChunkRecord*> chosen;
  for (const auto& r : dataset) {
    if (static_cast<int>(chosen.size()) >= max_chunks) break;
    chosen.push_back(&r);
  }
  if (chosen.empty()) throw DataError("data.empty_dataset");
  const double s = 1.0 / static_cast<double>(chosen.size());
  report.chunks = static_cast<int>(chosen.size());

  const char* names[] = {"implicit_field", "waypoints_fd", "quantized_fd", "bspline_quantized"};
  report.representations.resize(4);
  for (int i = 0; i < 4; ++i) report.representations[i].name = names[i];
  report.rollouts = {{"impedance_field", {}}, {"position_quantized", {}}};

  for (const ChunkRecord* rec : chosen) {
    const int idx = model.chunk_index(rec->id);
    if (idx < 0) throw DataError("data.unknown_chunk:" + rec->id);
    if (!rec->velocities) throw DataError("data.missing_velocities:" + rec->id);
    const int h = rec->horizon();
    const int k_up = u * (h - 1) + 1;
    const double T = rec->duration;
    const ModulatedField field = model.field_for(idx);

    RepresentationRow fr{"implicit_field"};
    const KinematicProfile base = sample_chunk(field, h, T, {true, true, false, false});
    fr.position_rmse = rmse(*base.position, rec->positions);
    fr.velocity_rmse = rmse(*base.velocity, *rec->velocities);
    const KinematicProfile up = sample_chunk(field, k_up, T, {false, true, false, false});
    fr.upsample_velocity_rmse = rmse(every_nth(*up.velocity, u), *rec->velocities);
    fr.upsample_jerk_rms = velocity_jitter(*up.velocity, T / (k_up - 1)).jerk_rms;
    accumulate(report.representations[0], fr, s);

    const WaypointChunk wp = waypoints_from(*rec);
    accumulate(report.representations[1],
               waypoint_row("waypoints_fd", wp, interp_linear(wp, k_up), *rec, u), s);
    const WaypointChunk q = quantize(wp, report.bins);
    accumulate(report.representations[2],
               waypoint_row("quantized_fd", q, interp_linear(q, k_up), *rec, u), s);

    int points = cfg.get_int("compare.bspline_points");
    if (points <= 0) points = std::max(4, (h + 1) / 2);
    points = std::min(points, h);
    const BsplineFit bf = fit_bspline(wp, points);
    WaypointChunk ctrl{bf.spline.control_points, T, false, report.bins};
    BsplineChunk bq = make_bspline(quantize(ctrl, report.bins).points, T);
    accumulate(report.representations[3],
               waypoint_row("bspline_quantized", bspline_sample(bq, h), bspline_sample(bq, k_up),
                            *rec, u),
               s);

    Plant plant = make_plant(dof, sim.mass, sim.damping, sim.dt);
    plant.position = rec->positions.row(0).transpose();
    plant.velocity = rec->velocities->row(0).transpose();
    const int steps = static_cast<int>(std::floor(T / sim.dt + 1e-9));
    const ControlTrace imp = run_impedance(plant, field, sim.gains, T, steps, sim.timing);
    const ControlTrace pos = run_position_ctrl(plant, q, sim.gains, steps, sim.timing);
    if (imp.aborted) throw DivergenceError(imp.abort_reason);
    if (pos.aborted) throw DivergenceError(pos.abort_reason);
    accumulate(report.rollouts[0].metrics, jitter_metrics(imp), s);
    accumulate(report.rollouts[1].metrics, jitter_metrics(pos), s);
  }
  return report;
}

std::string CompareReport::to_markdown() const {
  std::string out = "# Representation comparison\n\n";
  out += "Averaged over " + std::to_string(chunks) + " chunk(s); upsample factor " +
         std::to_string(upsample) + ", quantization bins " + std::to_string(bins) + ".\n\n";
  out += "| representation | position RMSE | velocity RMSE | upsampled velocity RMSE | upsampled jerk RMS |\n";
  out += "|---|---|---|---|---|\n";
  char buf[256];
  for (const auto& r : representations) {
    std::snprintf(buf, sizeof buf, "| %s | %.6g | %.6g | %.6g | %.6g |\n", r.name.c_str(),
                  r.position_rmse, r.velocity_rmse, r.upsample_velocity_rmse, r.upsample_jerk_rms);
    out += buf;
  }
  out += "\n| rollout | velocity zero-crossing rate (1/s) | jerk RMS | tracking RMSE | HF energy ratio |\n";
  out += "|---|---|---|---|---|\n";
  for (const auto& r : rollouts) {
    std::snprintf(buf, sizeof buf, "| %s | %.6g | %.6g | %.6g | %.6g |\n", r.controller.c_str(),
                  r.metrics.vel_zero_crossing_rate, r.metrics.jerk_rms, r.metrics.tracking_rmse,
                  r.metrics.hf_energy_ratio);
    out += buf;
  }
  return out;
}

std::string CompareReport::to_json() const {
  nlohmann::json j;
  j["chunks"] = chunks;
  j["upsample"] = upsample;
  j["bins"] = bins;
  j["representations"] = nlohmann::json::array();
  for (const auto& r : representations)
    j["representations"].push_back({{"name", r.name},
                                    {"position_rmse", r.position_rmse},
                                    {"velocity_rmse", r.velocity_rmse},
                                    {"upsample_velocity_rmse", r.upsample_velocity_rmse},
                                    {"upsample_jerk_rms", r.upsample_jerk_rms}});
  j["rollouts"] = nlohmann::json::array();
  for (const auto& r : rollouts)
    j["rollouts"].push_back({{"controller", r.controller},
                             {"vel_zero_crossing_rate", r.metrics.vel_zero_crossing_rate},
                             {"jerk_rms", r.metrics.jerk_rms},
                             {"tracking_rmse", r.metrics.tracking_rmse},
                             {"hf_energy_ratio", r.metrics.hf_energy_ratio}});
  return j.dump(2) + "\n";
}

OutputList cmd_compare(const RunConfig& cfg, const std::string& out_dir) {
  const Model model = load_checkpoint(cfg.require_path("io.checkpoint"));
  const auto dataset = read_dataset(cfg.require_path("io.dataset"));
  const CompareReport report = compare_representations(model, dataset, cfg);
  const std::string dir = prepare_dir(out_dir);
  const std::string md = (fs::path(dir) / "report.md").string();
  const std::string js = (fs::path(dir) / "report.json").string();
  std::ofstream(md, std::ios::trunc) << report.to_markdown();
  std::ofstream(js, std::ios::trunc) << report.to_json();
  return {md, js, echo_config(cfg, dir, "compare")};
}

}  // namespace actionfield

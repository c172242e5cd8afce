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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "actionfield/data.hpp"
#include "actionfield/errors.hpp"
#include "doctest.h"

using namespace actionfield;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "actionfield_test_data";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

bool records_equal(const ChunkRecord& a, const ChunkRecord& b) {
  if (a.id != b.id || a.duration != b.duration || a.anchored != b.anchored) return false;
  if (a.positions != b.positions || a.context != b.context) return false;
  if (a.velocities.has_value() != b.velocities.has_value()) return false;
  if (a.velocities && *a.velocities != *b.velocities) return false;
  if (a.offset.has_value() != b.offset.has_value()) return false;
  return !a.offset || *a.offset == *b.offset;
}

}  // namespace

TEST_CASE("min-jerk endpoints, midpoint and peak velocity") {
  const ChunkRecord r = gen_minjerk(vec({0.0}), vec({1.0}), 1.0, 3);
  CHECK(r.positions(0, 0) == 0.0);
  CHECK(r.positions(1, 0) == doctest::Approx(10.0 / 8 - 15.0 / 16 + 6.0 / 32).epsilon(1e-15));
  CHECK(r.positions(1, 0) == doctest::Approx(0.5));
  CHECK(r.positions(2, 0) == 1.0);
  CHECK((*r.velocities)(0, 0) == 0.0);
  CHECK((*r.velocities)(2, 0) == 0.0);
  CHECK((*r.velocities)(1, 0) == doctest::Approx(1.875).epsilon(1e-15));

  const ChunkRecord s = gen_minjerk(vec({1.0, -2.0}), vec({3.0, 2.0}), 2.0, 5);
  CHECK((*s.velocities)(2, 0) == doctest::Approx(1.875 * 2.0 / 2.0).epsilon(1e-15));
  CHECK((*s.velocities)(2, 1) == doctest::Approx(1.875 * 4.0 / 2.0).epsilon(1e-15));
  CHECK(s.positions.row(4) == vec({3.0, 2.0}).transpose());
  CHECK(s.context.size() == context_dim(2));
  CHECK(s.context.head(3) == vec({1, 0, 0}));
}

TEST_CASE("sines fixture values") {
  const ChunkRecord r = gen_sines({{{1.0, 1.0, 0.0}}}, 1.0, 201);
  CHECK(r.positions.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.positions.minCoeff() == doctest::Approx(-1.0).epsilon(1e-12));
  const ChunkRecord z = gen_sines({{{0.0, 1.0, 0.3}}, {{0.0, 2.0, 0.0}}}, 1.0, 9);
  CHECK(z.positions.isZero(0.0));
  CHECK(z.velocities->isZero(0.0));
}

TEST_CASE("pickplace dwell has zero velocity") {
  // 3 waypoints, T = 2.2, dwell 0.2 -> each move lasts 1.0 s, dwell in [1.0, 1.2].
  const ChunkRecord r = gen_pickplace({vec({0.0, 0.0}), vec({1.0, -1.0}), vec({0.5, 0.5})}, 0.2,
                                      2.2, 221);
  int dwell_samples = 0;
  for (int k = 0; k < r.horizon(); ++k) {
    const double t = 2.2 * k / 220.0;
    if (t >= 1.0 + 1e-9 && t < 1.2 - 1e-9) {
      ++dwell_samples;
      CHECK(r.velocities->row(k).isZero(0.0));
      CHECK(r.positions.row(k) == vec({1.0, -1.0}).transpose());
    }
  }
  CHECK(dwell_samples >= 18);
  CHECK(r.positions.row(0).isZero(0.0));
  CHECK(r.positions.row(220).isApprox(vec({0.5, 0.5}).transpose(), 1e-12));
  CHECK_THROWS_AS(gen_pickplace({vec({0.0}), vec({1.0}), vec({0.0})}, 3.0, 2.0, 5), ConfigError);
}

TEST_CASE("D1: stored velocities are the analytic derivative of the stored formula") {
  // Independent oracle: differentiate each generator's position formula
  // with a 5-point stencil on a fine step and compare at the grid points.
  const double T = 2.0;
  const int H = 17;
  const VectorXd x0 = vec({0.3, -0.7}), xf = vec({-0.2, 0.9});
  auto minjerk_pos = [&](double t, int d) {
    const double s = t / T;
    return x0(d) + (xf(d) - x0(d)) * (10 * std::pow(s, 3) - 15 * std::pow(s, 4) + 6 * std::pow(s, 5));
  };
  const std::vector<std::vector<SineComponent>> comps{{{0.5, 0.7, 0.2}, {0.2, 1.3, 1.0}},
                                                      {{0.4, 0.3, -0.5}}};
  auto sines_pos = [&](double t, int d) {
    double v = 0.0;
    for (const auto& c : comps[d]) v += c.amplitude * std::sin(2 * std::numbers::pi * c.frequency_hz * t + c.phase);
    return v;
  };
  auto stencil = [](auto&& f, double t, int d) {
    const double h = 1e-3;
    return (-f(t + 2 * h, d) + 8 * f(t + h, d) - 8 * f(t - h, d) + f(t - 2 * h, d)) / (12 * h);
  };
  const ChunkRecord mj = gen_minjerk(x0, xf, T, H);
  const ChunkRecord sn = gen_sines(comps, T, H);
  for (int k = 0; k < H; ++k) {
    const double t = T * k / (H - 1);
    for (int d = 0; d < 2; ++d) {
      CHECK(mj.positions(k, d) == doctest::Approx(minjerk_pos(t, d)).epsilon(1e-14));
      CHECK((*mj.velocities)(k, d) == doctest::Approx(stencil(minjerk_pos, t, d)).epsilon(1e-9));
      CHECK(sn.positions(k, d) == doctest::Approx(sines_pos(t, d)).epsilon(1e-14));
      CHECK((*sn.velocities)(k, d) == doctest::Approx(stencil(sines_pos, t, d)).epsilon(1e-9));
    }
  }
  // Pickplace: piecewise quintic; compare against the same stencil away from
  // segment boundaries.
  const std::vector<VectorXd> wps{vec({0.0}), vec({1.0}), vec({-0.5})};
  const double dwell = 0.3, move = (T - dwell) / 2;
  auto pp_pos = [&](double t, int) {
    auto q = [](double s) { return 10 * std::pow(s, 3) - 15 * std::pow(s, 4) + 6 * std::pow(s, 5); };
    if (t < move) return q(t / move);
    if (t < move + dwell) return 1.0;
    return 1.0 - 1.5 * q((t - move - dwell) / move);
  };
  const ChunkRecord pp = gen_pickplace(wps, dwell, T, 41);
  for (int k = 0; k < 41; ++k) {
    const double t = T * k / 40;
    if (std::abs(t - move) < 0.01 || std::abs(t - move - dwell) < 0.01) continue;
    CHECK(pp.positions(k, 0) == doctest::Approx(pp_pos(t, 0)).epsilon(1e-13));
    CHECK((*pp.velocities)(k, 0) == doctest::Approx(stencil(pp_pos, t, 0)).epsilon(1e-8));
  }
}

TEST_CASE("D2: anchoring") {
  ChunkRecord c;
  c.id = "const";
  c.duration = 1.0;
  c.positions = MatrixXd::Constant(4, 2, 5.0);
  c.velocities = MatrixXd::Zero(4, 2);
  c.context = VectorXd::Zero(context_dim(2));
  const ChunkRecord a = anchor_chunk(c);
  CHECK(a.positions.isZero(0.0));
  CHECK(*a.offset == VectorXd::Constant(2, 5.0));
  CHECK(records_equal(unanchor_chunk(a), c));
  CHECK_THROWS_AS(anchor_chunk(a), DataError);
  try {
    anchor_chunk(a);
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "data.already_anchored:const");
  }
  CHECK_THROWS_AS(unanchor_chunk(c), DataError);

  // Random chunk: velocities bitwise unchanged, first row exactly zero, and
  // the round trip is exact up to one rounding of (x - s) + s.
  ChunkRecord r = gen_minjerk(vec({0.31, -0.77, 0.5}), vec({-0.12, 0.93, 0.5}), 2.0, 10);
  r.id = "mj";
  const ChunkRecord ar = anchor_chunk(r);
  CHECK(*ar.velocities == *r.velocities);
  CHECK(ar.positions.row(0).isZero(0.0));
  const ChunkRecord back = unanchor_chunk(ar);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int k = 0; k < r.horizon(); ++k) {
    for (int d = 0; d < r.dim(); ++d) {
      const double x = r.positions(k, d), s = (*ar.offset)(d);
      CHECK(std::abs(back.positions(k, d) - x) <= eps * std::max(std::abs(x), std::abs(s)));
      // Sterbenz range: the subtraction is exact, so the round trip is bitwise.
      if (s != 0.0 && x / s >= 0.5 && x / s <= 2.0) CHECK(back.positions(k, d) == x);
    }
  }
}

TEST_CASE("dataset generation is deterministic and anchored") {
  for (TaskKind k : {TaskKind::kMinJerk, TaskKind::kSines, TaskKind::kPickPlace}) {
    const auto a = generate_dataset(k, 3, 4, 12, 2.0, 7, true);
    const auto b = generate_dataset(k, 3, 4, 12, 2.0, 7, true);
    REQUIRE(a.size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(records_equal(a[i], b[i]));
      CHECK(a[i].anchored);
      CHECK(a[i].positions.row(0).isZero(0.0));
      CHECK(a[i].id == std::string(task_name(k)) + "-" + std::to_string(i));
      CHECK(a[i].context(static_cast<int>(k)) == 1.0);
    }
    CHECK_FALSE(records_equal(generate_dataset(k, 1, 4, 12, 2.0, 8, true)[0], a[0]));
  }
}

TEST_CASE("JSONL round trip and errors") {
  auto recs = generate_dataset(TaskKind::kSines, 3, 2, 6, 1.5, 3, true);
  recs[2] = unanchor_chunk(recs[2]);
  recs[1].velocities.reset();
  const std::string path = temp_path("roundtrip.jsonl");
  write_dataset(path, recs);
  const auto back = read_dataset(path);
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(records_equal(back[i], recs[i]));

  const std::string empty = temp_path("empty.jsonl");
  std::ofstream(empty).close();
  CHECK(read_dataset(empty).empty());

  const std::string bad = temp_path("bad.jsonl");
  {
    std::ofstream out(bad);
    out << record_to_line(recs[0]) << "\n\n{not json\n";
  }
  try {
    read_dataset(bad);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()) == "data.malformed:line=3");
  }

  // H mismatch between positions and velocities is rejected with the id.
  {
    ChunkRecord m = recs[0];
    m.id = "broken";
    m.velocities = MatrixXd::Zero(m.horizon() - 1, m.dim());
    const std::string text = record_to_line(m);
    try {
      record_from_line(text, 1);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      const std::string what = e.what();
      CHECK(what.rfind("data.dimension", 0) == 0);
      CHECK(what.find("id=broken") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(read_dataset(temp_path("does_not_exist.jsonl")), DataError);
  CHECK_THROWS_AS(record_from_line("{\"id\":\"x\"}", 4), DataError);
}

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

// Minimal polyline plots. CSV outputs are the contract; these are for
// eyeballing runs.

#include <string>
#include <vector>

namespace actionfield {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct PlotPanel {
  std::string title;
  std::vector<PlotSeries> series;
};

// Panels are stacked vertically.
std::string render_svg(const std::vector<PlotPanel>& panels, int width = 720,
                       int panel_height = 220);
void write_svg(const std::string& path, const std::vector<PlotPanel>& panels);

}  // namespace actionfield

// Copyright 2026 The kickshape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <string>
#include <vector>

namespace kickshape::cli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool steps = false;  // draw as a piecewise-constant signal
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    double width = 720;
    double height = 360;
};

/// Renders a line chart as a standalone SVG document.
std::string render_svg(const Chart& chart);

/// Writes render_svg(chart) to `path`. Returns false (never throws) on any
/// failure so callers can treat plots as best effort.
bool write_svg(const std::string& path, const Chart& chart, std::string* error = nullptr);

}  // namespace kickshape::cli

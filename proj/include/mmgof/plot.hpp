#pragma once

// Minimal SVG line charts for pc curves and rejection curves.

#include <string>
#include <vector>

namespace mmgof {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct ChartLabels {
    std::string title;
    std::string x_axis;
    std::string y_axis;
};

// One polyline per series on a [x_min, x_max] x [0, 1] frame, plus a
// dashed horizontal reference line at `reference` when it lies in (0, 1).
[[nodiscard]] std::string svg_chart(const std::vector<Series>& series, const ChartLabels& labels, double reference);

}  // namespace mmgof

#pragma once

#include <string>
#include <utility>
#include <vector>

namespace roadsim::svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
    std::string color = "#1f77b4";
    bool second_axis = false;  // plot against the right-hand y axis
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::string y2_label;  // right-hand axis; empty if unused
    int width = 860;
    int height = 500;
};

// Standalone static SVG line chart. NaN points break the polyline.
std::string line_chart(const ChartSpec& spec, const std::vector<Series>& series);

}  // namespace roadsim::svg

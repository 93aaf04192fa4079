#pragma once

#include <string>
#include <vector>

namespace rsc::svg {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

struct ChartOptions {
    int width = 640;
    int height = 440;
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
};

// Self-contained SVG documents; no external assets.
std::string line_chart(const std::vector<Series>& series, const ChartOptions& opt);
std::string scatter_chart(const std::vector<Series>& series, const ChartOptions& opt);

void write_file(const std::string& path, const std::string& content);

}  // namespace rsc::svg

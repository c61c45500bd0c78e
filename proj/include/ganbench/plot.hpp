#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ganbench::plot {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    unsigned char r = 0, g = 0, b = 0;
};

struct ChartOptions {
    int width = 900;
    int height = 540;
    std::string title;
    std::string x_label;
    std::string y_label;
};

// Renders a line chart of the given series to a PNG file. Non-finite points
// break the polyline; series with no finite points are drawn only in the
// legend.
void write_line_chart(const std::filesystem::path& path, const std::vector<Series>& series,
                      const ChartOptions& options);

}  // namespace ganbench::plot

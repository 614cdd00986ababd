#pragma once

#include <string>
#include <vector>

namespace homtk::svg {

// Minimal static line plot, one polyline per series.
struct Series {
  std::vector<double> x, y;
  std::string color = "#1f77b4";
};

void write_plot(const std::string& path, const std::vector<Series>& series,
                const std::string& x_label, const std::string& y_label);

}  // namespace homtk::svg

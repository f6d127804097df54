#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

namespace advsamp {

// Deterministic SVG heatmap: `values(i, j)` colors the cell at grid position
// (column i along x, row j along y), low = dark blue, high = yellow. No
// timestamps or other run-dependent content.
void write_heatmap_svg(const Eigen::MatrixXd& values,
                       const std::pair<double, double>& x_range,
                       const std::pair<double, double>& y_range,
                       const std::string& title, const std::string& path,
                       const std::vector<std::pair<double, double>>& markers = {});

}  // namespace advsamp

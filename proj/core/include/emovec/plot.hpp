// SPDX-License-Identifier: Apache-2.0
#pragma once

// Standalone SVG charts with a fixed layout. Output depends only on the
// inputs, so identical data gives byte-identical files.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emovec/analysis.hpp"

namespace emovec::plot {

/// One bar per value, labels along the x axis, y in [0, 1].
std::string bar_chart_svg(std::span<const double> values, std::span<const std::string> labels,
                          std::string_view title);

/// One grey polyline per row plus a highlighted polyline for `mean`.
std::string overlay_svg(std::span<const std::vector<double>> rows, std::span<const double> mean,
                        std::span<const std::string> labels, std::string_view title);

/// Grid of cells shaded by value relative to the matrix maximum.
std::string heatmap_svg(const Matrix& m, std::span<const std::string> labels,
                        std::string_view title);

/// Sorted eigenvalues as dots joined by a line.
std::string scree_svg(std::span<const double> eigenvalues, std::string_view title);

}  // namespace emovec::plot

// SPDX-License-Identifier: Apache-2.0
#include "emovec/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "emovec/errors.hpp"

namespace emovec::plot {

namespace {

constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 110.0;
constexpr double kPlotHeight = 300.0;

std::string num(double v) {
  std::array<char, 32> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.2f", v);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(double width, double height, std::string_view title) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(width / 2) +
         "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">" +
         escape(title) + "</text>\n";
  return out;
}

// Axes for a [0, y_max] value range; returns nothing, appends to out.
void axes(std::string& out, double plot_width, double y_max) {
  const double x0 = kMarginLeft;
  const double y0 = kMarginTop + kPlotHeight;
  out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(kMarginTop) + "\" x2=\"" + num(x0) +
         "\" y2=\"" + num(y0) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0 + plot_width) +
         "\" y2=\"" + num(y0) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double frac = i / 4.0;
    const double y = y0 - frac * kPlotHeight;
    out += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" +
           num(frac * y_max) + "</text>\n";
  }
}

void x_labels(std::string& out, std::span<const std::string> labels, double step) {
  // Thin out labels so at most ~60 are drawn.
  const std::size_t stride = std::max<std::size_t>(1, (labels.size() + 59) / 60);
  const double y = kMarginTop + kPlotHeight + 8;
  for (std::size_t i = 0; i < labels.size(); i += stride) {
    const double x = kMarginLeft + (static_cast<double>(i) + 0.5) * step;
    out += "<text transform=\"translate(" + num(x) + "," + num(y) +
           ") rotate(60)\" font-family=\"sans-serif\" font-size=\"8\">" + escape(labels[i]) +
           "</text>\n";
  }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::string bar_chart_svg(std::span<const double> values, std::span<const std::string> labels,
                          std::string_view title) {
  if (values.empty() || values.size() != labels.size()) {
    throw ValidationError("bar chart: need one label per value");
  }
  const double step = std::max(4.0, 900.0 / static_cast<double>(values.size()));
  const double plot_width = step * static_cast<double>(values.size());
  std::string out = header(kMarginLeft + plot_width + kMarginRight,
                           kMarginTop + kPlotHeight + kMarginBottom, title);
  axes(out, plot_width, 1.0);
  out += "<g fill=\"steelblue\">\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double h = clamp01(values[i]) * kPlotHeight;
    out += "<rect x=\"" + num(kMarginLeft + static_cast<double>(i) * step + 0.1 * step) +
           "\" y=\"" + num(kMarginTop + kPlotHeight - h) + "\" width=\"" + num(0.8 * step) +
           "\" height=\"" + num(h) + "\"><title>" + escape(labels[i]) + "</title></rect>\n";
  }
  out += "</g>\n";
  x_labels(out, labels, step);
  out += "</svg>\n";
  return out;
}

std::string overlay_svg(std::span<const std::vector<double>> rows, std::span<const double> mean,
                        std::span<const std::string> labels, std::string_view title) {
  if (mean.empty() || mean.size() != labels.size()) {
    throw ValidationError("overlay: need one label per dimension");
  }
  const double step = std::max(4.0, 900.0 / static_cast<double>(mean.size()));
  const double plot_width = step * static_cast<double>(mean.size());
  std::string out = header(kMarginLeft + plot_width + kMarginRight,
                           kMarginTop + kPlotHeight + kMarginBottom, title);
  axes(out, plot_width, 1.0);
  auto polyline = [&](std::span<const double> ys, std::string_view style) {
    if (ys.size() != mean.size()) {
      throw ValidationError("overlay: rows differ in length");
    }
    out += "<polyline fill=\"none\" " + std::string(style) + " points=\"";
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (i) out += ' ';
      out += num(kMarginLeft + (static_cast<double>(i) + 0.5) * step) + "," +
             num(kMarginTop + kPlotHeight - clamp01(ys[i]) * kPlotHeight);
    }
    out += "\"/>\n";
  };
  for (const auto& row : rows) {
    polyline(row, "stroke=\"grey\" stroke-opacity=\"0.4\" stroke-width=\"1\"");
  }
  polyline(mean, "stroke=\"crimson\" stroke-width=\"2\" class=\"mean\"");
  x_labels(out, labels, step);
  out += "</svg>\n";
  return out;
}

std::string heatmap_svg(const Matrix& m, std::span<const std::string> labels,
                        std::string_view title) {
  const std::size_t n = m.size();
  if (n == 0 || labels.size() != n) {
    throw ValidationError("heatmap: need one label per row");
  }
  double max_abs = 0.0;
  for (double v : m.data()) max_abs = std::max(max_abs, std::abs(v));
  const double cell = std::max(2.0, 600.0 / static_cast<double>(n));
  const double side = cell * static_cast<double>(n);
  std::string out = header(kMarginLeft + side + kMarginRight, kMarginTop + side + 20.0, title);
  out += "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double t = max_abs > 0.0 ? std::abs(m(i, j)) / max_abs : 0.0;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - t)));
      // Blue for negative covariance, dark for large positive values.
      const std::string fill = m(i, j) < 0.0 ? "rgb(" + std::to_string(shade) + "," +
                                                   std::to_string(shade) + ",255)"
                                             : "rgb(" + std::to_string(shade) + "," +
                                                   std::to_string(shade) + "," +
                                                   std::to_string(shade) + ")";
      out += "<rect x=\"" + num(kMarginLeft + static_cast<double>(j) * cell) + "\" y=\"" +
             num(kMarginTop + static_cast<double>(i) * cell) + "\" width=\"" + num(cell) +
             "\" height=\"" + num(cell) + "\" fill=\"" + fill + "\"/>\n";
    }
  }
  out += "</g>\n";
  if (n <= 60) {
    for (std::size_t i = 0; i < n; ++i) {
      out += "<text x=\"" + num(kMarginLeft - 4) + "\" y=\"" +
             num(kMarginTop + (static_cast<double>(i) + 0.7) * cell) +
             "\" font-family=\"sans-serif\" font-size=\"8\" text-anchor=\"end\">" +
             escape(labels[i]) + "</text>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

std::string scree_svg(std::span<const double> eigenvalues, std::string_view title) {
  if (eigenvalues.empty()) {
    throw ValidationError("scree plot: no eigenvalues");
  }
  double y_max = 0.0;
  for (double v : eigenvalues) y_max = std::max(y_max, v);
  if (!(y_max > 0.0)) y_max = 1.0;
  const double step = std::max(3.0, 900.0 / static_cast<double>(eigenvalues.size()));
  const double plot_width = step * static_cast<double>(eigenvalues.size());
  std::string out = header(kMarginLeft + plot_width + kMarginRight,
                           kMarginTop + kPlotHeight + 40.0, title);
  axes(out, plot_width, y_max);
  auto y_of = [&](double v) {
    return kMarginTop + kPlotHeight - std::clamp(v / y_max, 0.0, 1.0) * kPlotHeight;
  };
  out += "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (i) out += ' ';
    out += num(kMarginLeft + (static_cast<double>(i) + 0.5) * step) + "," + num(y_of(eigenvalues[i]));
  }
  out += "\"/>\n<g fill=\"steelblue\">\n";
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    out += "<circle cx=\"" + num(kMarginLeft + (static_cast<double>(i) + 0.5) * step) +
           "\" cy=\"" + num(y_of(eigenvalues[i])) + "\" r=\"2\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace emovec::plot

#include "magloc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "magloc/errors.hpp"

namespace magloc {

namespace {
constexpr double kWidth = 760.0, kHeight = 520.0;
constexpr double kLeft = 80.0, kRight = 20.0, kTop = 40.0, kBottom = 60.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
}  // namespace

LogLogPlot::LogLogPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void LogLogPlot::add_series(const std::string& label, const std::string& color,
                            std::vector<std::pair<double, double>> points) {
  series_.push_back({label, color, std::move(points)});
}

void LogLogPlot::add_hline(const std::string& label, const std::string& color, double y) {
  hlines_.push_back({label, color, y});
}

void LogLogPlot::add_vband(double x0, double x1, const std::string& color) {
  vbands_.push_back({x0, x1, color});
}

void LogLogPlot::write(const std::string& path) const {
  double x_min = std::numeric_limits<double>::infinity(), x_max = 0.0;
  double y_min = std::numeric_limits<double>::infinity(), y_max = 0.0;
  for (const auto& s : series_) {
    for (const auto& [x, y] : s.points) {
      if (x > 0.0) { x_min = std::min(x_min, x); x_max = std::max(x_max, x); }
      if (y > 0.0) { y_min = std::min(y_min, y); y_max = std::max(y_max, y); }
    }
  }
  for (const auto& h : hlines_) {
    if (h.y > 0.0) { y_min = std::min(y_min, h.y); y_max = std::max(y_max, h.y); }
  }
  if (!(x_min < x_max) || !(y_min <= y_max))
    throw ContractError("empty-grid", "plot has no positive data");
  if (y_min == y_max) { y_min *= 0.5; y_max *= 2.0; }

  const double lx0 = std::log10(x_min), lx1 = std::log10(x_max);
  const double ly0 = std::log10(y_min) - 0.05 * (std::log10(y_max) - std::log10(y_min) + 1e-12);
  const double ly1 = std::log10(y_max) + 0.05 * (std::log10(y_max) - std::log10(y_min) + 1e-12);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (std::log10(x) - lx0) / (lx1 - lx0) * plot_w; };
  auto py = [&](double y) { return kTop + (ly1 - std::log10(y)) / (ly1 - ly0) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" << title_ << "</text>\n";

  for (const auto& b : vbands_) {
    const double x0 = px(std::max(b.x0, x_min)), x1 = px(std::min(b.x1, x_max));
    if (!(x1 > x0)) continue;
    svg << "<rect x=\"" << num(x0) << "\" y=\"" << num(kTop) << "\" width=\""
        << num(x1 - x0) << "\" height=\"" << num(plot_h) << "\" fill=\"" << b.color
        << "\" fill-opacity=\"0.18\"/>\n";
  }

  // Decade grid lines and tick labels.
  for (int e = static_cast<int>(std::ceil(lx0)); e <= static_cast<int>(std::floor(lx1)); ++e) {
    const double x = px(std::pow(10.0, e));
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(kTop + plot_h) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e"
        << e << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(ly0)); e <= static_cast<int>(std::floor(ly1)); ++e) {
    const double y = py(std::pow(10.0, e));
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\""
        << num(kLeft + plot_w) << "\" y2=\"" << num(y) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << e
        << "</text>\n";
  }
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
      << num(plot_w) << "\" height=\"" << num(plot_h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (const auto& h : hlines_) {
    const double y = py(h.y);
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\""
        << num(kLeft + plot_w) << "\" y2=\"" << num(y) << "\" stroke=\"" << h.color
        << "\" stroke-dasharray=\"6 3\"/>\n";
    svg << "<text x=\"" << num(kLeft + plot_w - 4) << "\" y=\"" << num(y - 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
        << h.color << "\">" << h.label << "</text>\n";
  }

  double legend_y = kTop + 16;
  for (const auto& s : series_) {
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\" points=\"";
    for (const auto& [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      svg << num(px(x)) << "," << num(py(y)) << " ";
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << num(kLeft + 10) << "\" y=\"" << num(legend_y)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << s.color << "\">"
        << s.label << "</text>\n";
    legend_y += 16;
  }

  svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << x_label_ << "</text>\n";
  svg << "<text x=\"18\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 " << kHeight / 2 << ")\">" << y_label_ << "</text>\n";
  svg << "</svg>\n";

  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const std::string body = svg.str();
  std::fwrite(body.data(), 1, body.size(), out);
  if (std::fclose(out) != 0) throw IoError("write failure on '" + path + "'");
}

}  // namespace magloc

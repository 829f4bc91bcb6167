#pragma once
#include <string>
#include <utility>
#include <vector>

namespace magloc {

/// Minimal self-contained SVG line plot with log-log axes: enough for the
/// CRLB curves (one curve per series, horizontal reference lines, shaded
/// vertical bands). No external tooling; output is deterministic for
/// identical inputs.
class LogLogPlot {
 public:
  LogLogPlot(std::string title, std::string x_label, std::string y_label);

  void add_series(const std::string& label, const std::string& color,
                  std::vector<std::pair<double, double>> points);
  void add_hline(const std::string& label, const std::string& color, double y);
  void add_vband(double x0, double x1, const std::string& color);

  /// Computes ranges from the data and writes the document.
  void write(const std::string& path) const;

 private:
  struct Series {
    std::string label, color;
    std::vector<std::pair<double, double>> points;
  };
  struct HLine {
    std::string label, color;
    double y;
  };
  struct VBand {
    double x0, x1;
    std::string color;
  };
  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  std::vector<HLine> hlines_;
  std::vector<VBand> vbands_;
};

}  // namespace magloc

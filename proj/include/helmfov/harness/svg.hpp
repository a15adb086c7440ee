#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace helmfov::harness {

using XY = std::pair<double, double>;

/// Minimal 2-D line/polygon plot written as standalone SVG.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_polyline(std::vector<XY> pts, std::string color, std::string label = {});
  void add_polygon(std::vector<XY> pts, std::string color, std::string label = {});
  void add_markers(std::vector<XY> pts, std::string color, std::string label = {});
  /// Straight reference line drawn dashed across the plot window.
  void add_reference_line(XY a, XY b, std::string color, std::string label = {});

  std::string render(int width = 640, int height = 480) const;
  void write(const std::filesystem::path& path) const;

 private:
  enum class Kind { polyline, polygon, markers, reference };
  struct Series {
    Kind kind;
    std::vector<XY> pts;
    std::string color;
    std::string label;
  };

  std::string title_;
  std::string x_label_;
  std::string y_label_;
  std::vector<Series> series_;
};

}  // namespace helmfov::harness

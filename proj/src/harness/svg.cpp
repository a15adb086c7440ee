#include "helmfov/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "helmfov/harness/csv.hpp"

namespace helmfov::harness {
namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_polyline(std::vector<XY> pts, std::string color, std::string label) {
  series_.push_back({Kind::polyline, std::move(pts), std::move(color), std::move(label)});
}

void SvgPlot::add_polygon(std::vector<XY> pts, std::string color, std::string label) {
  series_.push_back({Kind::polygon, std::move(pts), std::move(color), std::move(label)});
}

void SvgPlot::add_markers(std::vector<XY> pts, std::string color, std::string label) {
  series_.push_back({Kind::markers, std::move(pts), std::move(color), std::move(label)});
}

void SvgPlot::add_reference_line(XY a, XY b, std::string color, std::string label) {
  series_.push_back({Kind::reference, {a, b}, std::move(color), std::move(label)});
}

std::string SvgPlot::render(int width, int height) const {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const auto& s : series_) {
    if (s.kind == Kind::reference) continue;
    for (const auto& [x, y] : s.pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x0 <= x1)) {
    x0 = y0 = 0.0;
    x1 = y1 = 1.0;
  }
  const auto pad = [](double& lo, double& hi) {
    double span = hi - lo;
    if (span <= 0.0) span = std::max(std::abs(hi), 1.0) * 1e-3;
    lo -= 0.05 * span;
    hi += 0.05 * span;
  };
  pad(x0, x1);
  pad(y0, y1);

  const double left = 70;
  const double right = width - 20.0;
  const double top = 40;
  const double bottom = height - 50.0;
  const auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (right - left); };
  const auto py = [&](double y) { return bottom - (y - y0) / (y1 - y0) * (bottom - top); };
  const auto points_attr = [&](const std::vector<XY>& pts) {
    std::string out;
    for (const auto& [x, y] : pts) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      out += num(px(x)) + "," + num(py(y)) + " ";
    }
    return out;
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<clipPath id=\"frame\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\""
     << right - left << "\" height=\"" << bottom - top << "\"/></clipPath>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << right - left
     << "\" height=\"" << bottom - top << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0;
    const double yv = y0 + (y1 - y0) * t / 4.0;
    os << "<text x=\"" << num(px(xv)) << "\" y=\"" << bottom + 16 << "\" text-anchor=\"middle\">"
       << escape(format_number(std::round(xv * 1e4) / 1e4)) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">"
       << escape(format_number(std::round(yv * 1e4) / 1e4)) << "</text>\n";
  }
  os << "<text x=\"" << (left + right) / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\">" << escape(x_label_) << "</text>\n";
  os << "<text x=\"16\" y=\"" << (top + bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (top + bottom) / 2 << ")\">" << escape(y_label_) << "</text>\n";
  os << "<text x=\"" << (left + right) / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title_) << "</text>\n";

  os << "<g clip-path=\"url(#frame)\">\n";
  for (const auto& s : series_) {
    const std::string color = escape(s.color);
    switch (s.kind) {
      case Kind::polyline:
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
           << points_attr(s.pts) << "\"/>\n";
        break;
      case Kind::polygon:
        os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"" << color
           << "\" points=\"" << points_attr(s.pts) << "\"/>\n";
        break;
      case Kind::markers:
        for (const auto& [x, y] : s.pts) {
          if (!std::isfinite(x) || !std::isfinite(y)) continue;
          os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"2.5\" fill=\""
             << color << "\"/>\n";
        }
        break;
      case Kind::reference: {
        // Extend the segment far beyond the window; the clip path trims it.
        const auto [ax, ay] = s.pts[0];
        const auto [bx, by] = s.pts[1];
        const double reach = 1e3;
        const XY p{ax - reach * (bx - ax), ay - reach * (by - ay)};
        const XY q{ax + reach * (bx - ax), ay + reach * (by - ay)};
        os << "<line x1=\"" << num(px(p.first)) << "\" y1=\"" << num(py(p.second)) << "\" x2=\""
           << num(px(q.first)) << "\" y2=\"" << num(py(q.second)) << "\" stroke=\"" << color
           << "\" stroke-dasharray=\"6 4\"/>\n";
        break;
      }
    }
  }
  os << "</g>\n";

  double ly = top + 14;
  for (const auto& s : series_) {
    if (s.label.empty()) continue;
    os << "<rect x=\"" << right - 150 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\""
       << escape(s.color) << "\"/>\n";
    os << "<text x=\"" << right - 135 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

void SvgPlot::write(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << render();
}

}  // namespace helmfov::harness

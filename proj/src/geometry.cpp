#include "helmfov/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace helmfov {
namespace {

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }
double dot(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }

double segment_distance(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

Polygon merge_close(const Polygon& poly, double eps) {
  Polygon out;
  for (const auto& v : poly) {
    if (out.empty() || std::abs(v - out.back()) > eps) out.push_back(v);
  }
  while (out.size() > 1 && std::abs(out.front() - out.back()) <= eps) out.pop_back();
  return out;
}

}  // namespace

Polygon clip(const Polygon& poly, const HalfPlane& hp) {
  if (poly.empty()) return {};
  const auto side = [&](Complex z) { return dot(hp.normal, z) - hp.offset; };
  if (poly.size() == 1) return side(poly[0]) <= 0.0 ? poly : Polygon{};
  Polygon out;
  if (poly.size() == 2) {
    const double sa = side(poly[0]);
    const double sb = side(poly[1]);
    if (sa <= 0.0) out.push_back(poly[0]);
    if ((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0)) {
      out.push_back(poly[0] + (sa / (sa - sb)) * (poly[1] - poly[0]));
    }
    if (sb <= 0.0) out.push_back(poly[1]);
    return out;
  }
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Complex cur = poly[i];
    const Complex next = poly[(i + 1) % n];
    const double sc = side(cur);
    const double sn = side(next);
    if (sc <= 0.0) out.push_back(cur);
    if ((sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0)) {
      const double t = sc / (sc - sn);
      out.push_back(cur + t * (next - cur));
    }
  }
  return out;
}

Polygon intersect_halfplanes(const std::vector<HalfPlane>& planes, double half_width) {
  if (!(half_width >= 0.0)) throw std::invalid_argument("intersect_halfplanes: bad half-width");
  const double w = half_width;
  Polygon poly{{-w, -w}, {w, -w}, {w, w}, {-w, w}};
  const double eps = 64.0 * std::numeric_limits<double>::epsilon() * std::max(w, 1e-300);
  for (const auto& hp : planes) {
    poly = merge_close(clip(poly, hp), eps);
    if (poly.empty()) break;
  }
  return poly;
}

Polygon convex_hull(std::vector<Complex> pts) {
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Polygon hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

double polygon_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

Complex polygon_centroid(const Polygon& poly) {
  if (poly.empty()) throw std::invalid_argument("polygon_centroid: empty polygon");
  Complex mean = 0.0;
  for (const auto& v : poly) mean += v;
  mean /= static_cast<double>(poly.size());
  const double area = polygon_area(poly);
  double extent = 0.0;
  for (const auto& v : poly) extent = std::max(extent, std::abs(v - mean));
  if (std::abs(area) <= 1e-14 * extent * extent) return mean;
  // Shift to the vertex mean to limit cancellation.
  Complex c = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Complex p = poly[i] - mean;
    const Complex q = poly[(i + 1) % poly.size()] - mean;
    c += (p + q) * cross(p, q);
  }
  return mean + c / (6.0 * area);
}

double distance_to_polygon(const Polygon& poly, Complex z) {
  if (poly.empty()) return std::numeric_limits<double>::infinity();
  if (poly.size() == 1) return std::abs(z - poly[0]);
  bool inside = poly.size() >= 3;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Complex a = poly[i];
    const Complex b = poly[(i + 1) % poly.size()];
    if (cross(b - a, z - a) < 0.0) inside = false;
    best = std::min(best, segment_distance(z, a, b));
  }
  return inside ? 0.0 : best;
}

bool polygon_contains(const Polygon& poly, Complex z, double tol) {
  return distance_to_polygon(poly, z) <= tol;
}

double hausdorff_distance(const Polygon& a, const Polygon& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (const auto& v : a) d = std::max(d, distance_to_polygon(b, v));
  for (const auto& v : b) d = std::max(d, distance_to_polygon(a, v));
  return d;
}

Rectangle bounding_box(const std::vector<Complex>& points) {
  if (points.empty()) throw std::invalid_argument("bounding_box: no points");
  Rectangle r{points[0].real(), points[0].real(), points[0].imag(), points[0].imag()};
  for (const auto& p : points) {
    r.re_min = std::min(r.re_min, p.real());
    r.re_max = std::max(r.re_max, p.real());
    r.im_min = std::min(r.im_min, p.imag());
    r.im_max = std::max(r.im_max, p.imag());
  }
  return r;
}

}  // namespace helmfov

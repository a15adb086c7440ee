#pragma once

#include <vector>

#include "helmfov/common.hpp"

namespace helmfov {

/// Convex polygon in the complex plane, vertices counter-clockwise. A single
/// vertex or two vertices describe a degenerate (point or segment) polygon.
using Polygon = std::vector<Complex>;

/// Half-plane {z : Re(conj(normal) * z) <= offset}, i.e. normal . z <= offset.
struct HalfPlane {
  Complex normal;
  double offset = 0.0;
};

/// Clips a convex polygon against one half-plane (Sutherland-Hodgman).
Polygon clip(const Polygon& poly, const HalfPlane& hp);

/// Intersection of half-planes, starting from the square of the given
/// half-width centred at 0. Near-duplicate vertices are merged.
Polygon intersect_halfplanes(const std::vector<HalfPlane>& planes, double half_width);

/// Convex hull (counter-clockwise, no collinear points) of a point set.
Polygon convex_hull(std::vector<Complex> points);

double polygon_area(const Polygon& poly);
/// Area centroid; vertex mean for degenerate polygons.
Complex polygon_centroid(const Polygon& poly);
/// Euclidean distance from z to the polygon region (0 inside).
double distance_to_polygon(const Polygon& poly, Complex z);
bool polygon_contains(const Polygon& poly, Complex z, double tol);
/// Hausdorff distance between the two convex regions.
double hausdorff_distance(const Polygon& a, const Polygon& b);

struct Rectangle {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  Rectangle scaled(double factor) const {
    return {re_min * factor, re_max * factor, im_min * factor, im_max * factor};
  }
};

Rectangle bounding_box(const std::vector<Complex>& points);

}  // namespace helmfov

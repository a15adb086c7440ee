#include "helmfov/fov.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "helmfov/parallel.hpp"

namespace helmfov {
namespace {

struct AngleResult {
  double support = 0.0;
  Complex witness;
  double residual = 0.0;
  bool converged = false;
};

LinearOperator rotated_hermitian_part(const LinearOperator& b, Complex rot) {
  auto h = [b, rot](const CVector& x) -> CVector {
    return 0.5 * (rot * b.apply(x) + std::conj(rot) * b.apply_adjoint(x));
  };
  return LinearOperator(b.size(), h, h);
}

AngleResult extreme_at(const LinearOperator& b, Complex rot, const FovOptions& options) {
  LanczosOptions lo;
  lo.tol = options.eig_tol;
  lo.max_iter = options.max_lanczos;
  lo.seed = options.seed;
  const auto eig = lanczos_max_eig(rotated_hermitian_part(b, rot), lo);
  AngleResult r;
  r.converged = eig.converged;
  r.residual = eig.residual_norm;
  r.support = eig.converged ? eig.eigenvalue : eig.eigenvalue + eig.residual_norm;
  r.witness = eig.eigenvector.dot(b.apply(eig.eigenvector));
  return r;
}

}  // namespace

bool FovEnclosure::all_converged() const {
  for (bool c : converged) {
    if (!c) return false;
  }
  return true;
}

std::vector<int> FovEnclosure::flagged_angles() const {
  std::vector<int> out;
  for (std::size_t k = 0; k < converged.size(); ++k) {
    if (!converged[k]) out.push_back(static_cast<int>(k));
  }
  return out;
}

FovEnclosure compute_enclosure(const LinearOperator& b, const FovOptions& options) {
  if (!b.has_adjoint()) throw std::invalid_argument("compute_enclosure: operator needs an adjoint");
  if (options.n_angles < 8) throw std::invalid_argument("compute_enclosure: n_angles must be >= 8");
  const int n = options.n_angles;

  FovEnclosure enc;
  enc.angles.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    enc.angles[static_cast<std::size_t>(k)] =
        options.angle_offset + 2.0 * std::numbers::pi * k / static_cast<double>(n);
  }
  std::vector<AngleResult> results(static_cast<std::size_t>(n));
  parallel_for(n, options.threads, [&](int k) {
    const double theta = enc.angles[static_cast<std::size_t>(k)];
    results[static_cast<std::size_t>(k)] = extreme_at(b, std::polar(1.0, theta), options);
  });

  std::vector<HalfPlane> planes;
  for (int k = 0; k < n; ++k) {
    const auto& r = results[static_cast<std::size_t>(k)];
    enc.support.push_back(r.support);
    enc.witnesses.push_back(r.witness);
    enc.ritz_residuals.push_back(r.residual);
    enc.converged.push_back(r.converged);
    enc.scale = std::max(enc.scale, std::abs(r.support));
  }
  // Re(e^{i theta} z) = cos(theta) x - sin(theta) y.
  const double slack = 16.0 * std::numeric_limits<double>::epsilon() * enc.scale;
  for (int k = 0; k < n; ++k) {
    const double theta = enc.angles[static_cast<std::size_t>(k)];
    planes.push_back({std::conj(std::polar(1.0, theta)), enc.support[static_cast<std::size_t>(k)] + slack});
  }
  enc.polygon = intersect_halfplanes(planes, 2.0 * enc.scale);
  return enc;
}

double support_value(const LinearOperator& b, Complex direction, const FovOptions& options) {
  if (!b.has_adjoint()) throw std::invalid_argument("support_value: operator needs an adjoint");
  const double mag = std::abs(direction);
  if (!(mag > 0.0)) throw std::invalid_argument("support_value: zero direction");
  return extreme_at(b, direction / mag, options).support;
}

std::optional<double> FovDiagnostics::strip_min_scaled() const {
  if (!strip_min) return std::nullopt;
  return *strip_min / h_pow_d;
}

std::optional<double> FovDiagnostics::strip_max_scaled() const {
  if (!strip_max) return std::nullopt;
  return *strip_max / h_pow_d;
}

double FovDiagnostics::disc_ratio() const {
  const double c = std::abs(disc_center);
  return c > 0.0 ? disc_radius / c : std::numeric_limits<double>::infinity();
}

FovDiagnostics diagnostics(const FovEnclosure& enc, double h, int dim, double kappa2,
                           std::optional<double> sigma_const) {
  if (enc.polygon.empty() || enc.witnesses.empty()) {
    throw std::invalid_argument("diagnostics: empty enclosure");
  }
  if (!(h > 0.0) || dim < 1) throw std::invalid_argument("diagnostics: bad mesh size");
  FovDiagnostics d;
  d.h_pow_d = std::pow(h, dim);
  d.outer = bounding_box(enc.polygon);
  d.inner = bounding_box(enc.witnesses);
  if (sigma_const && *sigma_const > 0.0) {
    const double slope = kappa2 / *sigma_const;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& w : enc.witnesses) {
      const double v = w.real() + slope * w.imag();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    d.strip_min = lo;
    d.strip_max = hi;
  }
  d.origin_distance = distance_to_polygon(enc.polygon, 0.0);
  d.disc_center = polygon_centroid(enc.polygon);
  for (const auto& v : enc.polygon) d.disc_radius = std::max(d.disc_radius, std::abs(v - d.disc_center));
  d.disc_bound_applicable = d.origin_distance > 0.0 && d.disc_radius < std::abs(d.disc_center);
  return d;
}

RotationCheck rotation_check(const LinearOperator& b, double theta, const FovOptions& options,
                             double tol) {
  const Complex rot = std::polar(1.0, theta);
  const auto base = compute_enclosure(b, options);
  FovOptions shifted = options;
  shifted.angle_offset = options.angle_offset - theta;
  const auto rotated = compute_enclosure(scaled(rot, b), shifted);
  Polygon expected;
  for (const auto& v : base.polygon) expected.push_back(rot * v);
  RotationCheck out;
  out.scale = std::max(base.scale, std::numeric_limits<double>::min());
  out.hausdorff = hausdorff_distance(expected, rotated.polygon);
  out.passed = out.hausdorff < tol * out.scale;
  return out;
}

void write_enclosure_csv(std::ostream& os, const FovEnclosure& enc) {
  const auto precision = os.precision(17);
  os << "theta,support,witness_re,witness_im,converged\n";
  for (std::size_t k = 0; k < enc.angles.size(); ++k) {
    os << enc.angles[k] << ',' << enc.support[k] << ',' << enc.witnesses[k].real() << ','
       << enc.witnesses[k].imag() << ',' << (enc.converged[k] ? 1 : 0) << '\n';
  }
  os.precision(precision);
}

}  // namespace helmfov

#pragma once

// Gauge geometry of the Grushin structure on R^h x R^k with degeneracy exponent alpha:
// gauge norm, anisotropic dilations, the angular weight psi, the polar parametrization of
// the unit gauge sphere and tensor quadrature over it.

#include <cstddef>
#include <string>
#include <vector>

namespace grushin {

/// Structural constants (h, k, alpha). Invariants are checked on construction.
class GrushinParams {
 public:
  GrushinParams(int h, int k, int alpha);

  int h() const noexcept { return h_; }
  int k() const noexcept { return k_; }
  int alpha() const noexcept { return alpha_; }
  /// Topological dimension h + k.
  int n() const noexcept { return h_ + k_; }
  /// Homogeneous dimension h + (1 + alpha) k.
  int Q() const noexcept { return h_ + (1 + alpha_) * k_; }

  friend bool operator==(const GrushinParams&, const GrushinParams&) = default;

 private:
  int h_, k_, alpha_;
};

struct Point {
  std::vector<double> x;
  std::vector<double> y;

  static Point origin(const GrushinParams& params);
  /// Point from a flat coordinate list (x first, then y).
  static Point from_flat(const GrushinParams& params, const std::vector<double>& coords);
  std::vector<double> flat() const;
};

double gauge_norm(const GrushinParams& params, const Point& p);

/// (x, y) -> (lambda x, lambda^(alpha+1) y). Throws for lambda <= 0.
Point dilate(const GrushinParams& params, double lambda, const Point& p);

/// |x|^(2 alpha) / d^(2 alpha). Throws at the origin.
double psi_alpha(const GrushinParams& params, const Point& p);

/// The four coordinate systems of the gauge sphere, selected by (h, k).
enum class SphereCase { both_multi, k_single, h_single, both_single };

SphereCase sphere_case(const GrushinParams& params);

/// Closed range of the polar angle phi for a case; the periodic h = k = 1 case uses [-pi, pi].
struct AngleRange {
  double lo, hi;
};
AngleRange phi_range(const GrushinParams& params);

/// Angular coordinates (phi, theta, eta) of a point of the unit gauge sphere. theta has
/// max(h-1, 0) entries and eta max(k-1, 0); the coordinate case is derived from the params.
struct SpherePoint {
  double phi = 0.0;
  std::vector<double> theta;
  std::vector<double> eta;
};

/// Image of s at gauge radius rho. |x| = rho sin(phi)^(1/(alpha+1)) (signed when h = 1) and
/// |y| = rho^(alpha+1) cos(phi) / (alpha+1) (signed when k = 1).
Point sphere_to_cartesian(const GrushinParams& params, const SpherePoint& s, double rho);

/// Unit vector of S^(n-1) from n-1 hyperspherical angles; polar angles first, azimuth last.
std::vector<double> unit_vector(const std::vector<double>& angles);

/// Tensor rule for the unit gauge sphere.
///
/// weights_plain integrate against dH_alpha^{N-1}, weights_psi against psi dH_alpha^{N-1}.
/// points caches the Cartesian image of each node at rho = 1.
struct SphereQuadrature {
  GrushinParams params;
  std::vector<SpherePoint> nodes;
  std::vector<Point> points;
  std::vector<double> weights_plain;
  std::vector<double> weights_psi;
  int resolution = 0;

  std::size_t size() const noexcept { return nodes.size(); }
  double plain_mass() const;
  double psi_mass() const;
};

/// Builds the sphere rule. resolution is the number of phi nodes (split across the angular
/// patches); sub_resolution, when positive, sets the node count along each S^1 direction
/// (default: resolution). Throws for resolution < 8 or h, k > 3.
SphereQuadrature build_sphere_quadrature(const GrushinParams& params, int resolution,
                                         int sub_resolution = 0);

/// Human-readable summary of Q and the dilation/gauge formulas for params.
std::string formula_table(const GrushinParams& params);

}  // namespace grushin

#pragma once

// Residuals of the Pohozaev identity and the integration-by-parts formula on gauge balls,
// and the scaling laws of gauge balls and spheres.

#include <vector>

#include "grushin/field.hpp"
#include "grushin/geometry.hpp"

namespace grushin {

/// X_G u = x . grad_x u + (alpha+1) y . grad_y u at each point.
std::vector<double> xg_derivative(const FieldEvaluator& u, const std::vector<Point>& points);

struct PohozaevTerms {
  double grad_ball = 0.0;    // int_B |grad_alpha u|^2
  double grad_sphere = 0.0;  // int_dB |grad_alpha u|^2
  double xg_sphere = 0.0;    // int_dB psi (X_G u)^2
  double v_sphere = 0.0;     // int_dB V u^2
  double v_ball = 0.0;       // int_B V u^2
  double dv_ball = 0.0;      // int_B (X_G V) u^2
  double lhs = 0.0, rhs = 0.0;
  double scale = 0.0;        // sum of the integrals of the absolute integrands
  double residual = 0.0;     // |lhs - rhs| / scale, 0 when scale = 0
};

/// Both sides of the Pohozaev identity on B_r for -Delta_alpha u = V u. V may be null.
PohozaevTerms pohozaev_residual(const FieldEvaluator& u, const FieldEvaluator* V, double r,
                                const SphereQuadrature& quad, int radial_resolution = 32);

struct IntByPartsTerms {
  double laplacian_term = 0.0;  // int_B v Delta_alpha u
  double boundary_term = 0.0;   // int_dB (psi / d) v X_G u
  double gradient_term = 0.0;   // int_B grad_alpha u . grad_alpha v
  double scale = 0.0;
  double residual = 0.0;
};

IntByPartsTerms int_by_parts_residual(const FieldEvaluator& u, const FieldEvaluator& v, double r,
                                      const SphereQuadrature& quad, int radial_resolution = 32);

struct ScalingReport {
  std::vector<double> radii;
  std::vector<double> volume_cartesian, volume_polar;
  std::vector<double> surface_cartesian, surface_polar;
  double volume_law_error = 0.0;   // max_r |V(r) / (r^Q V(1)) - 1|, Cartesian route
  double surface_law_error = 0.0;  // max_r |S(r) / (r^(Q-1) S(1)) - 1|, Cartesian route
  double volume_route_gap = 0.0;   // max_r |polar / Cartesian - 1|
  double surface_route_gap = 0.0;
  std::vector<double> coarea_steps;
  std::vector<double> coarea_errors;  // |dF/dr by central difference - surface integral|
  double coarea_order = 0.0;
};

/// Volume of the gauge ball of radius r by adaptive quadrature over |x| (Cartesian route).
double gauge_ball_volume(const GrushinParams& params, double r);
/// dH_alpha mass of the gauge sphere of radius r, the r-derivative of gauge_ball_volume.
double gauge_sphere_mass(const GrushinParams& params, double r);

/// Volume and surface laws at r in {0.5, 1, 2} by the Cartesian and polar routes, and the
/// coarea identity for a smooth test function by central differences in r.
ScalingReport scaling_checks(const SphereQuadrature& quad, int radial_resolution = 48);

}  // namespace grushin

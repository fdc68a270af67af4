#pragma once

// Height H(r), energy D(r) and the Almgren frequency N(r) = D/H of a function around the
// origin, plus the identity D = r H'/2 and vanishing-order estimates.

#include <string>
#include <vector>

#include "grushin/field.hpp"
#include "grushin/geometry.hpp"

namespace grushin {

struct ProfileProvenance {
  std::string source;  // "grid 257x257 on [...]" or "analytic"
  int quadrature_resolution = 0;
  std::size_t quadrature_nodes = 0;
  int radial_resolution = 0;
};

struct RadialProfile {
  GrushinParams params;
  std::vector<double> radii, H, D, N;
  ProfileProvenance provenance;
  std::vector<std::string> warnings;

  /// Indices where N <= -1.
  std::vector<std::size_t> below_minus_one() const;
};

/// sum_i w_psi[i] u(delta_r node_i)^2.
double height_H(const FieldEvaluator& u, const SphereQuadrature& quad, double r);
double height_H(const ScalarField& u, const SphereQuadrature& quad, double r);

/// r^(2-Q) times the ball integral of |grad_alpha u|^2 - V u^2. V may be null.
double energy_D(const FieldEvaluator& u, const FieldEvaluator* V, const SphereQuadrature& quad,
                double r, int radial_resolution);
double energy_D(const ScalarField& u, const ScalarField* V, const SphereQuadrature& quad,
                double r, int radial_resolution);

/// H, D and N at each radius (parallel over radii). Throws an invariant error when H <= 0.
RadialProfile almgren_profile(const FieldEvaluator& u, const FieldEvaluator* V,
                              const std::vector<double>& radii, const SphereQuadrature& quad,
                              int radial_resolution);

/// |D - r H'/2| / (|D| + |H|) per radius; H' from five-point finite differences.
std::vector<double> dh_identity_residual(const RadialProfile& profile);

struct EllEstimate {
  double ell_N;  // N extrapolated to r = 0 from the three smallest radii
  double ell_H;  // half the least-squares slope of log H against log r
};

EllEstimate extract_ell(const RadialProfile& profile);

}  // namespace grushin

#pragma once

// Angular patches covering the phi range of the gauge sphere. Near a pole where sin(phi) = 0
// the patch variable is z with |sin(phi)| = |z|^(alpha+1), which absorbs the singular
// density; elsewhere the variable is phi itself.

#include <vector>

#include "grushin/geometry.hpp"

namespace grushin::detail {

enum class PatchKind { pole_zero, pole_pi, angle };

struct AngularPatch {
  PatchKind kind;
  double z0, z1;
};

struct PatchPoint {
  double phi;  // in the case range
  double s;    // x-radial coordinate on the unit sphere, signed when h = 1
  double c;    // cos(phi)
  double jac;  // dphi/dz > 0
};

PatchPoint evaluate_patch(const GrushinParams& params, const AngularPatch& patch, double z);

/// Patches in increasing phi order. With `half`, only phi >= 0 is covered (h = 1 parity
/// problems). `periodic` is set for the full h = k = 1 chain.
std::vector<AngularPatch> angular_patches(const GrushinParams& params, bool half, bool* periodic);

/// Patch coordinate of the phi value phi (inverse of evaluate_patch); index of the patch.
int locate_patch(const GrushinParams& params, const std::vector<AngularPatch>& patches, double phi,
                 double* z);

/// |sin(phi)|^((h-1-alpha)/(alpha+1)) |cos(phi)|^(k-1) / (alpha+1)^k times dphi/dz.
double density_times_jacobian(const GrushinParams& params, const PatchKind kind,
                              const PatchPoint& pp);

/// Cartesian point from unit-sphere radial parts (s, c), sub-sphere angles and rho.
Point cartesian_from_parts(const GrushinParams& params, double s, double c,
                           const std::vector<double>& theta, const std::vector<double>& eta,
                           double rho);

}  // namespace grushin::detail

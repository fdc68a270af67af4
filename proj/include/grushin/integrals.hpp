#pragma once

// Integrals over gauge spheres and balls by dilation pullback of a unit-sphere rule:
// dx dy = rho^(Q-1) d rho dH_alpha on the unit sphere.

#include <functional>

#include "grushin/geometry.hpp"

namespace grushin {

using PointFunction = std::function<double(const Point&)>;

/// Integral of f over the sphere of gauge radius r against dH_alpha (or psi dH_alpha).
double sphere_integral(const SphereQuadrature& quad, double r, const PointFunction& f,
                       bool psi_weighted = false);

/// Integral of f over the gauge ball of radius r with `radial_nodes` Gauss-Legendre nodes.
double ball_integral(const SphereQuadrature& quad, double r, int radial_nodes,
                     const PointFunction& f);

/// Calls fn(point, weight) for every node of the sphere rule dilated to radius r; weights
/// include the r^(Q-1) factor.
void visit_sphere(const SphereQuadrature& quad, double r,
                  const std::function<void(const Point&, double)>& fn);

/// Ball nodes per radial Gauss-Legendre node: fn(radial_index, point, weight). Radial shells
/// are visited in parallel; fn must only write to per-shell state.
void visit_ball(const SphereQuadrature& quad, double r, int radial_nodes,
                const std::function<void(std::size_t, const Point&, double)>& fn);

}  // namespace grushin

#include "grushin/integrals.hpp"

#include <cmath>

#include "grushin/errors.hpp"
#include "grushin/parallel.hpp"
#include "grushin/quadrature.hpp"

namespace grushin {

double sphere_integral(const SphereQuadrature& quad, double r, const PointFunction& f,
                       bool psi_weighted) {
  require(r > 0.0, "sphere radius must be positive");
  const auto& w = psi_weighted ? quad.weights_psi : quad.weights_plain;
  double s = 0.0;
  for (std::size_t i = 0; i < quad.size(); ++i) s += w[i] * f(dilate(quad.params, r, quad.points[i]));
  return std::pow(r, quad.params.Q() - 1) * s;
}

double ball_integral(const SphereQuadrature& quad, double r, int radial_nodes,
                     const PointFunction& f) {
  require(r > 0.0, "ball radius must be positive");
  require(radial_nodes >= 2, "radial resolution must be at least 2");
  const Rule1D rule = gauss_legendre(radial_nodes, 0.0, r);
  double total = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k)
    total += rule.weights[k] * sphere_integral(quad, rule.nodes[k], f);
  return total;
}

void visit_sphere(const SphereQuadrature& quad, double r,
                  const std::function<void(const Point&, double)>& fn) {
  require(r > 0.0, "sphere radius must be positive");
  const double f = std::pow(r, quad.params.Q() - 1);
  for (std::size_t i = 0; i < quad.size(); ++i)
    fn(dilate(quad.params, r, quad.points[i]), f * quad.weights_plain[i]);
}

void visit_ball(const SphereQuadrature& quad, double r, int radial_nodes,
                const std::function<void(std::size_t, const Point&, double)>& fn) {
  require(r > 0.0, "ball radius must be positive");
  require(radial_nodes >= 2, "radial resolution must be at least 2");
  const Rule1D rule = gauss_legendre(radial_nodes, 0.0, r);
  parallel_for(rule.nodes.size(), [&](std::size_t k) {
    const double rho = rule.nodes[k];
    const double f = rule.weights[k] * std::pow(rho, quad.params.Q() - 1);
    for (std::size_t i = 0; i < quad.size(); ++i)
      fn(k, dilate(quad.params, rho, quad.points[i]), f * quad.weights_plain[i]);
  });
}

}  // namespace grushin

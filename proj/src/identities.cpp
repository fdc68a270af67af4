#include "grushin/identities.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "grushin/errors.hpp"
#include "grushin/integrals.hpp"
#include "grushin/quadrature.hpp"

namespace grushin {

namespace {

constexpr double pi = std::numbers::pi;

void require_covered(const FieldEvaluator& u, const SphereQuadrature& quad, double r) {
  require(u.params() == quad.params, "field and sphere quadrature use different (h, k, alpha)");
  for (const Point& p : quad.points)
    if (!u.covers(dilate(quad.params, r, p)))
      fail(ErrorKind::invalid_argument, "gauge ball exits the grid domain");
}

// Sum of per-shell partial sums in shell order, so the result does not depend on threads.
double ordered_sum(const std::vector<double>& parts) {
  double s = 0.0;
  for (double v : parts) s += v;
  return s;
}

// |S^(n-1)| for the x directions (two points when n = 1) and the volume of the unit
// k-ball.
double sphere_area(int n) { return n == 1 ? 2.0 : n == 2 ? 2.0 * pi : 4.0 * pi; }
double ball_volume(int n) { return n == 1 ? 2.0 : n == 2 ? pi : 4.0 * pi / 3.0; }

}  // namespace

std::vector<double> xg_derivative(const FieldEvaluator& u, const std::vector<Point>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const Point& p : points) {
    if (!u.covers(p)) fail(ErrorKind::invalid_argument, "xg_derivative: point outside the field domain");
    out.push_back(xg_from_gradient(u.params(), p, u.gradient(p)));
  }
  return out;
}

PohozaevTerms pohozaev_residual(const FieldEvaluator& u, const FieldEvaluator* V, double r,
                                const SphereQuadrature& quad, int radial_resolution) {
  require_covered(u, quad, r);
  if (V) require_covered(*V, quad, r);
  const GrushinParams& pr = quad.params;
  const double Q = pr.Q();
  PohozaevTerms t;

  double v_sphere_abs = 0.0;
  visit_sphere(quad, r, [&](const Point& p, double w) {
    const auto g = u.gradient(p);
    const double uv = u.value(p);
    const double xg = xg_from_gradient(pr, p, g);
    t.grad_sphere += w * grushin_gradient_sq(pr, p, g);
    t.xg_sphere += w * psi_alpha(pr, p) * xg * xg;
    if (V) {
      const double vv = V->value(p);
      t.v_sphere += w * vv * uv * uv;
      v_sphere_abs += w * std::abs(vv) * uv * uv;
    }
  });

  const std::size_t nr = static_cast<std::size_t>(radial_resolution);
  std::vector<double> gb(nr, 0.0), vb(nr, 0.0), vb_abs(nr, 0.0), dvb(nr, 0.0), dvb_abs(nr, 0.0);
  visit_ball(quad, r, radial_resolution, [&](std::size_t k, const Point& p, double w) {
    gb[k] += w * grushin_gradient_sq(pr, p, u.gradient(p));
    if (V) {
      const double uv = u.value(p), vv = V->value(p);
      const double xgv = xg_from_gradient(pr, p, V->gradient(p));
      vb[k] += w * vv * uv * uv;
      vb_abs[k] += w * std::abs(vv) * uv * uv;
      dvb[k] += w * xgv * uv * uv;
      dvb_abs[k] += w * std::abs(xgv) * uv * uv;
    }
  });
  t.grad_ball = ordered_sum(gb);
  t.v_ball = ordered_sum(vb);
  t.dv_ball = ordered_sum(dvb);

  t.lhs = -0.5 * (Q - 2.0) * t.grad_ball + 0.5 * r * t.grad_sphere - t.xg_sphere / r;
  t.rhs = 0.5 * r * t.v_sphere - 0.5 * Q * t.v_ball - 0.5 * t.dv_ball;
  t.scale = 0.5 * (Q - 2.0) * t.grad_ball + 0.5 * r * t.grad_sphere + t.xg_sphere / r +
            0.5 * r * v_sphere_abs + 0.5 * Q * ordered_sum(vb_abs) + 0.5 * ordered_sum(dvb_abs);
  t.residual = t.scale > 0.0 ? std::abs(t.lhs - t.rhs) / t.scale : 0.0;
  return t;
}

IntByPartsTerms int_by_parts_residual(const FieldEvaluator& u, const FieldEvaluator& v, double r,
                                      const SphereQuadrature& quad, int radial_resolution) {
  require_covered(u, quad, r);
  require_covered(v, quad, r);
  require(u.params() == v.params(), "u and v use different (h, k, alpha)");
  const GrushinParams& pr = quad.params;
  IntByPartsTerms t;
  double boundary_abs = 0.0;
  visit_sphere(quad, r, [&](const Point& p, double w) {
    const double f = psi_alpha(pr, p) / r * v.value(p) * xg_from_gradient(pr, p, u.gradient(p));
    t.boundary_term += w * f;
    boundary_abs += w * std::abs(f);
  });
  const std::size_t nr = static_cast<std::size_t>(radial_resolution);
  std::vector<double> lap(nr, 0.0), lap_abs(nr, 0.0), grad(nr, 0.0), grad_abs(nr, 0.0);
  visit_ball(quad, r, radial_resolution, [&](std::size_t k, const Point& p, double w) {
    const double a = v.value(p) * u.grushin_laplacian(p);
    const double b = grushin_gradient_dot(pr, p, u.gradient(p), v.gradient(p));
    lap[k] += w * a;
    lap_abs[k] += w * std::abs(a);
    grad[k] += w * b;
    grad_abs[k] += w * std::abs(b);
  });
  t.laplacian_term = ordered_sum(lap);
  t.gradient_term = ordered_sum(grad);
  t.scale = ordered_sum(lap_abs) + boundary_abs + ordered_sum(grad_abs);
  const double sum = t.laplacian_term - t.boundary_term + t.gradient_term;
  t.residual = t.scale > 0.0 ? std::abs(sum) / t.scale : 0.0;
  return t;
}

namespace {

// 1 - (xi / r)^(2a) from xi and its distance to the nearest end of [0, r]. Near xi = r the
// direct difference cancels, so the distance d = r - xi is used instead.
double gauge_gap(double xi, double xc, double r, double a2) {
  if (xc > 0.0) return -std::expm1(a2 * std::log1p(-xc / r));
  return 1.0 - std::pow(xi / r, a2);
}

double cartesian_route(const GrushinParams& params, double r, bool surface) {
  require(r > 0.0, "radius must be positive");
  require(params.h() <= 3 && params.k() <= 3, "Cartesian route implemented for h, k <= 3");
  const double a1 = params.alpha() + 1.0;
  const int h = params.h(), k = params.k();
  const double rp = std::pow(r, 2.0 * a1);
  boost::math::quadrature::tanh_sinh<double> integrator;
  // |y| <= R(xi) = r^a sqrt(gap) / a on the ball; the surface integrand is d/dr of the volume
  // integrand, and R(r) = 0 removes the endpoint term.
  return integrator.integrate(
      [&](double xi, double xc) {
        const double gap = gauge_gap(xi, xc, r, 2.0 * a1);
        if (!(gap > 0.0)) return 0.0;
        const double R = std::sqrt(rp * gap) / a1;
        const double base = sphere_area(h) * std::pow(xi, h - 1) * ball_volume(k);
        if (!surface) return base * std::pow(R, k);
        const double dR = std::pow(r, 2.0 * a1 - 1.0) / std::sqrt(rp * gap);
        return base * k * std::pow(R, k - 1) * dR;
      },
      0.0, r, 1e-14);
}

}  // namespace

double gauge_ball_volume(const GrushinParams& params, double r) {
  return cartesian_route(params, r, false);
}

double gauge_sphere_mass(const GrushinParams& params, double r) {
  return cartesian_route(params, r, true);
}

ScalingReport scaling_checks(const SphereQuadrature& quad, int radial_resolution) {
  const GrushinParams& pr = quad.params;
  const double Q = pr.Q();
  ScalingReport rep;
  rep.radii = {0.5, 1.0, 2.0};
  for (double r : rep.radii) {
    rep.volume_cartesian.push_back(gauge_ball_volume(pr, r));
    rep.surface_cartesian.push_back(gauge_sphere_mass(pr, r));
    rep.volume_polar.push_back(ball_integral(quad, r, radial_resolution, [](const Point&) { return 1.0; }));
    rep.surface_polar.push_back(sphere_integral(quad, r, [](const Point&) { return 1.0; }));
  }
  const double v1 = rep.volume_cartesian[1], s1 = rep.surface_cartesian[1];
  for (std::size_t i = 0; i < rep.radii.size(); ++i) {
    const double r = rep.radii[i];
    rep.volume_law_error = std::max(rep.volume_law_error,
                                    std::abs(rep.volume_cartesian[i] / (std::pow(r, Q) * v1) - 1.0));
    rep.surface_law_error = std::max(
        rep.surface_law_error, std::abs(rep.surface_cartesian[i] / (std::pow(r, Q - 1.0) * s1) - 1.0));
    rep.volume_route_gap = std::max(rep.volume_route_gap,
                                    std::abs(rep.volume_polar[i] / rep.volume_cartesian[i] - 1.0));
    rep.surface_route_gap = std::max(rep.surface_route_gap,
                                     std::abs(rep.surface_polar[i] / rep.surface_cartesian[i] - 1.0));
  }

  // Coarea: d/dr int_{B_r} f = int_{dB_r} f dH_alpha for a smooth f, at r = 1.
  const auto f = [](const Point& p) {
    const auto z = p.flat();
    double s = 0.0;
    for (double v : z) s += v * v;
    return std::exp(-s) * (1.0 + 0.5 * z[0]) + z.back() * z.back();
  };
  const double exact = sphere_integral(quad, 1.0, f);
  for (double step : {0.04, 0.02}) {
    const double up = ball_integral(quad, 1.0 + step, radial_resolution, f);
    const double dn = ball_integral(quad, 1.0 - step, radial_resolution, f);
    rep.coarea_steps.push_back(step);
    rep.coarea_errors.push_back(std::abs((up - dn) / (2.0 * step) - exact));
  }
  rep.coarea_order = std::log(rep.coarea_errors[0] / rep.coarea_errors[1]) / std::log(2.0);
  return rep;
}

}  // namespace grushin

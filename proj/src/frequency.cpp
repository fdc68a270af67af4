#include "grushin/frequency.hpp"

#include <cmath>
#include <cstdio>
#include <memory>

#include "grushin/errors.hpp"
#include "grushin/integrals.hpp"
#include "grushin/parallel.hpp"
#include "grushin/quadrature.hpp"

namespace grushin {

namespace {

// The gauge ball of radius r sits in the box |x_i| <= r, |y_j| <= r^(alpha+1)/(alpha+1).
void require_ball_inside(const FieldEvaluator& u, double r) {
  require(r > 0.0, "radius must be positive");
  const GrushinParams& pr = u.params();
  const double ry = std::pow(r, pr.alpha() + 1) / (pr.alpha() + 1);
  const int n = pr.n();
  for (int corner = 0; corner < (1 << n); ++corner) {
    std::vector<double> z(n);
    for (int a = 0; a < n; ++a) z[a] = ((corner >> a) & 1 ? 1.0 : -1.0) * (a < pr.h() ? r : ry);
    if (!u.covers(Point::from_flat(pr, z))) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "gauge ball of radius %.17g exits the grid domain", r);
      fail(ErrorKind::invalid_argument, buf);
    }
  }
}

void require_same_params(const FieldEvaluator& u, const SphereQuadrature& quad) {
  require(u.params() == quad.params, "field and sphere quadrature use different (h, k, alpha)");
}

}  // namespace

std::vector<std::size_t> RadialProfile::below_minus_one() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < N.size(); ++i)
    if (!(N[i] > -1.0)) out.push_back(i);
  return out;
}

double height_H(const FieldEvaluator& u, const SphereQuadrature& quad, double r) {
  require_same_params(u, quad);
  require_ball_inside(u, r);
  double s = 0.0;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const double v = u.value(dilate(quad.params, r, quad.points[i]));
    s += quad.weights_psi[i] * v * v;
  }
  return s;
}

double height_H(const ScalarField& u, const SphereQuadrature& quad, double r) {
  return height_H(GridFunction(u), quad, r);
}

double energy_D(const FieldEvaluator& u, const FieldEvaluator* V, const SphereQuadrature& quad,
                double r, int radial_resolution) {
  require_same_params(u, quad);
  require_ball_inside(u, r);
  if (V) {
    require_same_params(*V, quad);
    require_ball_inside(*V, r);
  }
  const GrushinParams& pr = quad.params;
  const double integral = ball_integral(quad, r, radial_resolution, [&](const Point& p) {
    const double g2 = grushin_gradient_sq(pr, p, u.gradient(p));
    if (!V) return g2;
    const double v = u.value(p);
    return g2 - V->value(p) * v * v;
  });
  return std::pow(r, 2 - pr.Q()) * integral;
}

double energy_D(const ScalarField& u, const ScalarField* V, const SphereQuadrature& quad,
                double r, int radial_resolution) {
  const GridFunction gu(u);
  if (!V) return energy_D(gu, nullptr, quad, r, radial_resolution);
  const GridFunction gv(*V);
  return energy_D(gu, &gv, quad, r, radial_resolution);
}

RadialProfile almgren_profile(const FieldEvaluator& u, const FieldEvaluator* V,
                              const std::vector<double>& radii, const SphereQuadrature& quad,
                              int radial_resolution) {
  require(!radii.empty(), "almgren_profile needs at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require(radii[i] > 0.0, "radii must be positive");
    require(i == 0 || radii[i] > radii[i - 1], "radii must be strictly increasing");
    require_ball_inside(u, radii[i]);
  }
  RadialProfile out{quad.params, radii, {}, {}, {}, {}, {}};
  out.provenance.quadrature_resolution = quad.resolution;
  out.provenance.quadrature_nodes = quad.size();
  out.provenance.radial_resolution = radial_resolution;
  out.provenance.source = "analytic";
  if (const auto* g = dynamic_cast<const GridFunction*>(&u)) {
    const GridSpec& grid = g->field().grid();
    std::string src = "grid";
    double hmax = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      src += (a ? "x" : " ") + std::to_string(grid.nodes(a));
      hmax = std::max(hmax, grid.spacing(a));
    }
    out.provenance.source = src;
    for (double r : radii) {
      if (r < 4.0 * hmax) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "radius %.17g is below 4 grid spacings; interpolation error dominates", r);
        out.warnings.emplace_back(buf);
      }
    }
  }
  const std::size_t n = radii.size();
  out.H.assign(n, 0.0);
  out.D.assign(n, 0.0);
  out.N.assign(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    out.H[i] = height_H(u, quad, radii[i]);
    out.D[i] = energy_D(u, V, quad, radii[i], radial_resolution);
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (!(out.H[i] > 0.0)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "H(r) = %.17g <= 0 at r = %.17g", out.H[i], radii[i]);
      fail(ErrorKind::invariant, buf);
    }
    out.N[i] = out.D[i] / out.H[i];
  }
  return out;
}

std::vector<double> dh_identity_residual(const RadialProfile& profile) {
  const std::size_t n = profile.radii.size();
  require(n >= 5, "dh_identity_residual needs at least 5 radii");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = std::min(i >= 2 ? i - 2 : 0, n - 5);
    const std::vector<double> nodes(profile.radii.begin() + lo, profile.radii.begin() + lo + 5);
    const auto w = finite_difference_weights(profile.radii[i], nodes, 1);
    double dH = 0.0;
    for (int j = 0; j < 5; ++j) dH += w[j] * profile.H[lo + j];
    const double lhs = profile.D[i], rhs = 0.5 * profile.radii[i] * dH;
    const double scale = std::abs(profile.D[i]) + std::abs(profile.H[i]);
    out[i] = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
  }
  return out;
}

EllEstimate extract_ell(const RadialProfile& profile) {
  const auto& r = profile.radii;
  const std::size_t n = r.size();
  require(n >= 8, "extract_ell needs at least 8 radii");
  require(r.back() >= 4.0 * r.front() * (1.0 - 1e-12), "extract_ell radii must span a factor of 4");

  // Quadratic through the three smallest radii, evaluated at r = 0.
  double ell_N = 0.0;
  for (int j = 0; j < 3; ++j) {
    double lj = 1.0;
    for (int m = 0; m < 3; ++m)
      if (m != j) lj *= (0.0 - r[m]) / (r[j] - r[m]);
    ell_N += lj * profile.N[j];
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(r[i]), y = std::log(profile.H[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / denom;
  const double ell_H = 0.5 * slope;
  if (!std::isfinite(ell_N) || !std::isfinite(ell_H))
    fail(ErrorKind::invariant, "non-finite vanishing-order fit");
  return {ell_N, ell_H};
}

}  // namespace grushin

#include "grushin/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "grushin/detail/patches.hpp"
#include "grushin/errors.hpp"
#include "grushin/quadrature.hpp"

namespace grushin {

namespace {

constexpr double pi = std::numbers::pi;

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return s;
}

double sign(double v) { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

GrushinParams::GrushinParams(int h, int k, int alpha) : h_(h), k_(k), alpha_(alpha) {
  require(h >= 1, "h must be a positive integer");
  require(k >= 1, "k must be a positive integer");
  require(alpha >= 0, "alpha must be a nonnegative integer");
}

Point Point::origin(const GrushinParams& params) {
  return Point{std::vector<double>(params.h(), 0.0), std::vector<double>(params.k(), 0.0)};
}

Point Point::from_flat(const GrushinParams& params, const std::vector<double>& coords) {
  require(static_cast<int>(coords.size()) == params.n(), "point has wrong dimension");
  Point p;
  p.x.assign(coords.begin(), coords.begin() + params.h());
  p.y.assign(coords.begin() + params.h(), coords.end());
  return p;
}

std::vector<double> Point::flat() const {
  std::vector<double> out(x);
  out.insert(out.end(), y.begin(), y.end());
  return out;
}

double gauge_norm(const GrushinParams& params, const Point& p) {
  const double a1 = params.alpha() + 1.0;
  const double x2 = norm2(p.x), y2 = norm2(p.y);
  if (x2 == 0.0 && y2 == 0.0) return 0.0;
  return std::pow(std::pow(x2, a1) + a1 * a1 * y2, 0.5 / a1);
}

Point dilate(const GrushinParams& params, double lambda, const Point& p) {
  require(lambda > 0.0 && std::isfinite(lambda), "dilation factor must be positive");
  const double ly = std::pow(lambda, params.alpha() + 1);
  Point out = p;
  for (double& v : out.x) v *= lambda;
  for (double& v : out.y) v *= ly;
  return out;
}

double psi_alpha(const GrushinParams& params, const Point& p) {
  const double d = gauge_norm(params, p);
  require(d > 0.0, "psi_alpha is undefined at the origin");
  if (params.alpha() == 0) return 1.0;
  const double ratio = std::sqrt(norm2(p.x)) / d;
  return std::min(1.0, std::pow(ratio, 2 * params.alpha()));
}

SphereCase sphere_case(const GrushinParams& params) {
  const bool hm = params.h() >= 2, km = params.k() >= 2;
  if (hm && km) return SphereCase::both_multi;
  if (hm) return SphereCase::k_single;
  if (km) return SphereCase::h_single;
  return SphereCase::both_single;
}

AngleRange phi_range(const GrushinParams& params) {
  switch (sphere_case(params)) {
    case SphereCase::both_multi: return {0.0, pi / 2};
    case SphereCase::k_single: return {0.0, pi};
    case SphereCase::h_single: return {-pi / 2, pi / 2};
    case SphereCase::both_single: return {-pi, pi};
  }
  return {0.0, 0.0};
}

std::vector<double> unit_vector(const std::vector<double>& angles) {
  const std::size_t n = angles.size() + 1;
  std::vector<double> w(n);
  double prod = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w[i] = prod * std::cos(angles[i]);
    prod *= std::sin(angles[i]);
  }
  w[n - 1] = prod;
  return w;
}

namespace detail {

Point cartesian_from_parts(const GrushinParams& params, double s, double c,
                           const std::vector<double>& theta, const std::vector<double>& eta,
                           double rho) {
  const double a1 = params.alpha() + 1.0;
  const double r = rho * s;
  const double t = std::pow(rho, a1) * c / a1;
  Point p;
  if (params.h() == 1) {
    p.x = {r};
  } else {
    p.x = unit_vector(theta);
    for (double& v : p.x) v *= r;
  }
  if (params.k() == 1) {
    p.y = {t};
  } else {
    p.y = unit_vector(eta);
    for (double& v : p.y) v *= t;
  }
  return p;
}

PatchPoint evaluate_patch(const GrushinParams& params, const AngularPatch& patch, double z) {
  const double a1 = params.alpha() + 1.0;
  PatchPoint pp{};
  switch (patch.kind) {
    case PatchKind::angle: {
      pp.phi = z;
      const double sn = std::sin(z);
      pp.s = sign(sn) * std::pow(std::abs(sn), 1.0 / a1);
      pp.c = std::cos(z);
      pp.jac = 1.0;
      break;
    }
    case PatchKind::pole_zero:
    case PatchKind::pole_pi: {
      const double az = std::abs(z);
      const double abs_sin = std::pow(az, a1);
      const double abs_cos = std::sqrt(std::max(0.0, 1.0 - abs_sin * abs_sin));
      pp.jac = a1 * std::pow(az, params.alpha()) / abs_cos;
      if (patch.kind == PatchKind::pole_zero) {
        pp.phi = std::asin(sign(z) * abs_sin);
        pp.s = z;
        pp.c = abs_cos;
      } else {
        pp.phi = pi + std::asin(sign(z) * abs_sin);
        if (pp.phi > pi) pp.phi -= 2.0 * pi;
        pp.s = -z;
        pp.c = -abs_cos;
      }
      if (params.h() >= 2) pp.s = std::abs(pp.s);
      break;
    }
  }
  return pp;
}

std::vector<AngularPatch> angular_patches(const GrushinParams& params, bool half, bool* periodic) {
  const double sstar = std::pow(std::sin(pi / 4), 1.0 / (params.alpha() + 1.0));
  const auto P0 = PatchKind::pole_zero, PP = PatchKind::pole_pi, A = PatchKind::angle;
  if (periodic) *periodic = false;
  switch (sphere_case(params)) {
    case SphereCase::both_multi:
      return {{P0, 0.0, sstar}, {A, pi / 4, pi / 2}};
    case SphereCase::k_single:
      return {{P0, 0.0, sstar}, {A, pi / 4, 3 * pi / 4}, {PP, -sstar, 0.0}};
    case SphereCase::h_single:
      if (half) return {{P0, 0.0, sstar}, {A, pi / 4, pi / 2}};
      return {{A, -pi / 2, -pi / 4}, {P0, -sstar, sstar}, {A, pi / 4, pi / 2}};
    case SphereCase::both_single:
      if (half) return {{P0, 0.0, sstar}, {A, pi / 4, 3 * pi / 4}, {PP, -sstar, 0.0}};
      if (periodic) *periodic = true;
      return {{A, -3 * pi / 4, -pi / 4}, {P0, -sstar, sstar}, {A, pi / 4, 3 * pi / 4},
              {PP, -sstar, sstar}};
  }
  return {};
}

int locate_patch(const GrushinParams& params, const std::vector<AngularPatch>& patches, double phi,
                 double* z) {
  const double a1 = params.alpha() + 1.0;
  const double sn = std::sin(phi);
  const double root = sign(sn) * std::pow(std::abs(sn), 1.0 / a1);
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const auto& p = patches[i];
    double cand = 0.0;
    switch (p.kind) {
      case PatchKind::angle: cand = phi; break;
      case PatchKind::pole_zero:
        if (std::cos(phi) < 0.0) continue;
        cand = root;
        break;
      case PatchKind::pole_pi:
        if (std::cos(phi) > 0.0) continue;
        cand = -root;
        break;
    }
    const double slack = 1e-12 * (1.0 + std::abs(p.z1 - p.z0));
    if (cand < p.z0 - slack || cand > p.z1 + slack) continue;
    *z = std::clamp(cand, p.z0, p.z1);
    return static_cast<int>(i);
  }
  return -1;
}

double density_times_jacobian(const GrushinParams& params, PatchKind kind, const PatchPoint& pp) {
  const double a1 = params.alpha() + 1.0;
  const int h = params.h(), k = params.k();
  if (kind == PatchKind::angle) {
    const double abs_sin = std::abs(std::sin(pp.phi));
    return std::pow(abs_sin, (h - 1.0 - params.alpha()) / a1) *
           std::pow(std::abs(pp.c), k - 1.0) / std::pow(a1, k);
  }
  return std::pow(a1, 1.0 - k) * std::pow(std::abs(pp.s), h - 1.0) *
         std::pow(std::abs(pp.c), k - 2.0);
}

}  // namespace detail

Point sphere_to_cartesian(const GrushinParams& params, const SpherePoint& s, double rho) {
  require(rho > 0.0 && std::isfinite(rho), "sphere_to_cartesian: rho must be positive");
  const auto range = phi_range(params);
  require(std::isfinite(s.phi) && s.phi >= range.lo && s.phi <= range.hi,
          "sphere_to_cartesian: phi outside the angular domain of this case");
  require(static_cast<int>(s.theta.size()) == std::max(params.h() - 1, 0),
          "sphere_to_cartesian: theta has wrong length");
  require(static_cast<int>(s.eta.size()) == std::max(params.k() - 1, 0),
          "sphere_to_cartesian: eta has wrong length");
  const double a1 = params.alpha() + 1.0;
  const double sn = std::sin(s.phi);
  double r = std::pow(std::abs(sn), 1.0 / a1);
  if (params.h() == 1) r *= sign(sn);
  return detail::cartesian_from_parts(params, r, std::cos(s.phi), s.theta, s.eta, rho);
}

double SphereQuadrature::plain_mass() const {
  double s = 0.0;
  for (double w : weights_plain) s += w;
  return s;
}

double SphereQuadrature::psi_mass() const {
  double s = 0.0;
  for (double w : weights_psi) s += w;
  return s;
}

namespace {

struct SubRule {
  std::vector<std::vector<double>> angles;
  std::vector<double> weights;
};

// Quadrature on S^(dim-1); dim <= 3.
SubRule sub_sphere_rule(int dim, int m) {
  SubRule rule;
  if (dim == 1) {
    rule.angles.push_back({});
    rule.weights.push_back(1.0);
  } else if (dim == 2) {
    for (int j = 0; j < m; ++j) {
      rule.angles.push_back({2.0 * pi * j / m});
      rule.weights.push_back(2.0 * pi / m);
    }
  } else {
    const auto gl = gauss_legendre(std::max(2, m / 2), -1.0, 1.0);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      for (int j = 0; j < m; ++j) {
        rule.angles.push_back({std::acos(gl.nodes[i]), 2.0 * pi * j / m});
        rule.weights.push_back(gl.weights[i] * 2.0 * pi / m);
      }
    }
  }
  return rule;
}

}  // namespace

SphereQuadrature build_sphere_quadrature(const GrushinParams& params, int resolution,
                                         int sub_resolution) {
  require(resolution >= 8, "sphere quadrature resolution must be at least 8");
  require(params.h() <= 3 && params.k() <= 3, "sphere quadrature is limited to h, k <= 3");
  const int m = sub_resolution > 0 ? sub_resolution : resolution;

  const auto patches = detail::angular_patches(params, false, nullptr);
  const int per_patch =
      std::max(4, (resolution + static_cast<int>(patches.size()) - 1) /
                      static_cast<int>(patches.size()));

  struct PhiNode {
    detail::PatchPoint pp;
    double w;
  };
  std::vector<PhiNode> phi_nodes;
  for (const auto& patch : patches) {
    const auto gl = gauss_legendre(per_patch, patch.z0, patch.z1);
    for (int i = 0; i < per_patch; ++i) {
      const auto pp = detail::evaluate_patch(params, patch, gl.nodes[i]);
      phi_nodes.push_back({pp, gl.weights[i] * detail::density_times_jacobian(params, patch.kind, pp)});
    }
  }

  const SubRule theta_rule = sub_sphere_rule(params.h(), m);
  const SubRule eta_rule = sub_sphere_rule(params.k(), m);

  SphereQuadrature q{params, {}, {}, {}, {}, resolution};
  const std::size_t total = phi_nodes.size() * theta_rule.weights.size() * eta_rule.weights.size();
  q.nodes.reserve(total);
  q.points.reserve(total);
  q.weights_plain.reserve(total);
  q.weights_psi.reserve(total);
  for (const auto& pn : phi_nodes) {
    for (std::size_t a = 0; a < theta_rule.weights.size(); ++a) {
      for (std::size_t b = 0; b < eta_rule.weights.size(); ++b) {
        SpherePoint sp{pn.pp.phi, theta_rule.angles[a], eta_rule.angles[b]};
        Point pt = detail::cartesian_from_parts(params, pn.pp.s, pn.pp.c, sp.theta, sp.eta, 1.0);
        const double w = pn.w * theta_rule.weights[a] * eta_rule.weights[b];
        q.weights_plain.push_back(w);
        q.weights_psi.push_back(w * psi_alpha(params, pt));
        q.nodes.push_back(std::move(sp));
        q.points.push_back(std::move(pt));
      }
    }
  }
  return q;
}

std::string formula_table(const GrushinParams& params) {
  const int a = params.alpha();
  std::ostringstream os;
  os << "h = " << params.h() << ", k = " << params.k() << ", alpha = " << a << "\n"
     << "N = h + k = " << params.n() << "\n"
     << "Q = h + (1 + alpha) k = " << params.Q() << "\n"
     << "dilation:    delta_l(x, y) = (l x, l^" << a + 1 << " y)\n"
     << "gauge norm:  d(x, y) = (|x|^" << 2 * (a + 1) << " + " << (a + 1) * (a + 1)
     << " |y|^2)^(1/" << 2 * (a + 1) << ")\n"
     << "weight:      psi(x, y) = |x|^" << 2 * a << " / d^" << 2 * a << "\n"
     << "volume:      |B_r| = r^" << params.Q() << " |B_1|,  surface mass ~ r^" << params.Q() - 1
     << "\n"
     << "eigenvalues: mu_n = n (n + " << params.Q() - 2 << ") / " << (a + 1) * (a + 1)
     << "  (proven for h >= 2)\n";
  return os.str();
}

}  // namespace grushin

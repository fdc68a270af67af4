#include <gtest/gtest.h>

#include <cmath>

#include "grushin/builtins.hpp"
#include "grushin/errors.hpp"
#include "grushin/identities.hpp"

using namespace grushin;

namespace {

double ball_volume_oracle(int h, int k, int alpha) {
  const double area[] = {0.0, 2.0, 2.0 * M_PI, 4.0 * M_PI};
  const double unit_ball[] = {0.0, 2.0, M_PI, 4.0 * M_PI / 3.0};
  const double a = alpha + 1.0;
  return area[h] * unit_ball[k] * std::pow(a, -k) * std::beta(h / (2.0 * a), k / 2.0 + 1.0) /
         (2.0 * a);
}

}  // namespace

TEST(Pohozaev, ExactHarmonicsBalance) {
  const GrushinParams p{1, 1, 1};
  const SphereQuadrature quad = build_sphere_quadrature(p, 64);
  for (const auto& terms : std::vector<std::vector<std::string>>{
           {"1*x1"}, {"1*x1*y1"}, {"1*x1^4", "-6*y1^2"}, {"1*y1^3", "-0.5*x1^4*y1"}, {"1", "1*x1", "2*y1"}}) {
    const AnalyticField u = Polynomial::parse(p, terms).as_field();
    for (double r : {0.2, 0.5}) {
      const PohozaevTerms t = pohozaev_residual(u, nullptr, r, quad);
      EXPECT_LT(t.residual, 1e-8) << terms[0] << " r=" << r;
      EXPECT_GT(t.scale, 0.0);
    }
  }
}

TEST(Pohozaev, ConstantPotential) {
  // -Delta_alpha u = lam u for u = cos(sqrt(lam) x) + y-independent.
  const GrushinParams p{1, 1, 1};
  const SphereQuadrature quad = build_sphere_quadrature(p, 64);
  const double lam = 3.0, s = std::sqrt(lam);
  const AnalyticField u(
      p, [&](const Point& q) { return std::cos(s * q.x[0]) + 0.5 * std::sin(s * q.x[0]); },
      [&](const Point& q) {
        return std::vector<double>{-s * std::sin(s * q.x[0]) + 0.5 * s * std::cos(s * q.x[0]), 0.0};
      },
      [&](const Point& q) { return -lam * (std::cos(s * q.x[0]) + 0.5 * std::sin(s * q.x[0])); });
  const AnalyticField V = Potential::constant(p, lam).as_field();
  const PohozaevTerms t = pohozaev_residual(u, &V, 0.4, quad);
  EXPECT_LT(t.residual, 1e-8);
  EXPECT_NE(t.v_ball, 0.0);
}

TEST(Pohozaev, DetectsAWrongEquation) {
  // x^2 is not harmonic, so the identity for V = 0 must fail visibly.
  const GrushinParams p{1, 1, 1};
  const SphereQuadrature quad = build_sphere_quadrature(p, 32);
  const AnalyticField u = Polynomial::parse(p, {"1*x1^2"}).as_field();
  EXPECT_GT(pohozaev_residual(u, nullptr, 0.5, quad).residual, 1e-2);
}

TEST(IntByParts, SmoothPairs) {
  for (const GrushinParams p : {GrushinParams(1, 1, 1), GrushinParams(2, 1, 1), GrushinParams(1, 2, 2)}) {
    const SphereQuadrature quad = build_sphere_quadrature(p, 128, 32);
    const AnalyticField u = Polynomial::parse(p, {"1*x1^2", "1*y1", "0.5*x1*y1^2"}).as_field();
    const AnalyticField v = Polynomial::parse(p, {"1", "1*x1^2", "1*y1"}).as_field();
    const IntByPartsTerms t = int_by_parts_residual(u, v, 0.6, quad);
    EXPECT_LT(t.residual, 1e-9) << p.h() << p.k() << p.alpha();
    EXPECT_GT(std::abs(t.gradient_term), 0.0);
  }
}

TEST(XG, GeneratorOfDilations) {
  // X_G u = d/dl u(delta_l z) at l = 1.
  const GrushinParams p{2, 1, 2};
  const AnalyticField u = Polynomial::parse(p, {"1*x1^2*y1", "1*x2", "3*y1^2"}).as_field();
  const Point z = Point::from_flat(p, {0.3, -0.4, 0.2});
  const double h = 1e-5;
  const double fd = (u.value(dilate(p, 1 + h, z)) - u.value(dilate(p, 1 - h, z))) / (2 * h);
  EXPECT_NEAR(xg_derivative(u, {z})[0], fd, 1e-8);
}

TEST(Scaling, BallVolumeClosedForm) {
  for (const GrushinParams p : {GrushinParams(1, 1, 1), GrushinParams(2, 1, 1), GrushinParams(2, 2, 3),
                                GrushinParams(1, 3, 1), GrushinParams(3, 3, 2)}) {
    const double oracle = ball_volume_oracle(p.h(), p.k(), p.alpha());
    EXPECT_NEAR(gauge_ball_volume(p, 1.0) / oracle, 1.0, 1e-10);
    EXPECT_NEAR(gauge_ball_volume(p, 1.7) / (std::pow(1.7, p.Q()) * oracle), 1.0, 1e-10);
    EXPECT_NEAR(gauge_sphere_mass(p, 1.0) / (p.Q() * oracle), 1.0, 1e-12);
  }
}

TEST(Scaling, ReportLawsAndRoutes) {
  for (const GrushinParams p : {GrushinParams(1, 1, 1), GrushinParams(2, 1, 1), GrushinParams(2, 2, 1)}) {
    const ScalingReport s = scaling_checks(build_sphere_quadrature(p, 48));
    EXPECT_LT(s.volume_law_error, 1e-6);
    EXPECT_LT(s.surface_law_error, 1e-6);
    EXPECT_LT(s.volume_route_gap, 1e-6);
    EXPECT_LT(s.surface_route_gap, 1e-6);
    EXPECT_NEAR(s.coarea_order, 2.0, 0.1);
  }
}

TEST(Scaling, RejectsNonPositiveRadius) {
  EXPECT_THROW(gauge_ball_volume(GrushinParams(1, 1, 1), 0.0), Error);
}

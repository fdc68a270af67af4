#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "grushin/errors.hpp"
#include "grushin/geometry.hpp"
#include "grushin/integrals.hpp"

using namespace grushin;
using boost::math::quadrature::gauss_kronrod;

namespace {

// |B_1| for general (h, k, alpha) in closed form. With |y| <= sqrt(1 - |x|^(2a)) / a on the
// ball (a = alpha + 1), |B_1| = A_h w_k a^-k int_0^1 t^(h-1) (1 - t^(2a))^(k/2) dt and the
// t integral is B(h / 2a, k/2 + 1) / 2a.
double ball_volume_oracle(int h, int k, int alpha) {
  const double area[] = {0.0, 2.0, 2.0 * M_PI, 4.0 * M_PI};
  const double unit_ball[] = {0.0, 2.0, M_PI, 4.0 * M_PI / 3.0};
  const double a = alpha + 1.0;
  return area[h] * unit_ball[k] * std::pow(a, -k) * std::beta(h / (2.0 * a), k / 2.0 + 1.0) /
         (2.0 * a);
}

}  // namespace

TEST(Params, HomogeneousDimension) {
  EXPECT_EQ(GrushinParams(1, 1, 1).Q(), 3);
  EXPECT_EQ(GrushinParams(2, 1, 1).Q(), 4);
  EXPECT_EQ(GrushinParams(2, 2, 1).Q(), 6);
  EXPECT_EQ(GrushinParams(3, 2, 4).Q(), 13);
  EXPECT_EQ(GrushinParams(2, 1, 0).Q(), 3);
}

TEST(Params, RejectsInvalid) {
  EXPECT_THROW(GrushinParams(0, 1, 1), Error);
  EXPECT_THROW(GrushinParams(1, 0, 1), Error);
  EXPECT_THROW(GrushinParams(1, 1, -1), Error);
}

TEST(Gauge, DilationHomogeneity) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> c(-1.0, 1.0), lam(0.1, 3.0);
  for (const GrushinParams p : {GrushinParams(1, 1, 1), GrushinParams(2, 1, 2), GrushinParams(1, 2, 3)}) {
    for (int t = 0; t < 50; ++t) {
      std::vector<double> z(p.n());
      for (double& v : z) v = c(rng);
      const Point q = Point::from_flat(p, z);
      const double l = lam(rng);
      EXPECT_NEAR(gauge_norm(p, dilate(p, l, q)), l * gauge_norm(p, q), 1e-12);
      EXPECT_NEAR(psi_alpha(p, dilate(p, l, q)), psi_alpha(p, q), 1e-12);
    }
  }
}

TEST(Gauge, ExplicitValue) {
  // d^4 = x^4 + 4 y^2 for alpha = 1.
  const GrushinParams p{1, 1, 1};
  const Point q = Point::from_flat(p, {0.5, 0.25});
  EXPECT_NEAR(gauge_norm(p, q), std::pow(0.0625 + 0.25, 0.25), 1e-15);
  EXPECT_NEAR(psi_alpha(p, q), 0.25 / std::sqrt(0.0625 + 0.25), 1e-15);
  EXPECT_THROW(psi_alpha(p, Point::origin(p)), Error);
  EXPECT_THROW(dilate(p, 0.0, q), Error);
}

TEST(Sphere, NodesLieOnTheGaugeSphere) {
  for (const GrushinParams p : {GrushinParams(1, 1, 1), GrushinParams(2, 1, 1), GrushinParams(2, 2, 1),
                                GrushinParams(1, 2, 2), GrushinParams(3, 1, 1)}) {
    const SphereQuadrature quad = build_sphere_quadrature(p, 24);
    for (const Point& q : quad.points) EXPECT_NEAR(gauge_norm(p, q), 1.0, 1e-12);
    const Point big = sphere_to_cartesian(p, quad.nodes[3], 2.5);
    EXPECT_NEAR(gauge_norm(p, big), 2.5, 1e-12);
  }
}

TEST(Sphere, PlainMassIsQTimesBallVolume) {
  // |B_r| = r^Q |B_1|, so the sphere mass is its r-derivative at 1.
  for (const GrushinParams p : {GrushinParams(1, 1, 1), GrushinParams(2, 1, 1), GrushinParams(2, 2, 1),
                                GrushinParams(1, 1, 2), GrushinParams(3, 1, 1), GrushinParams(1, 3, 1)}) {
    const SphereQuadrature quad = build_sphere_quadrature(p, 128, 16);
    const double oracle = p.Q() * ball_volume_oracle(p.h(), p.k(), p.alpha());
    EXPECT_NEAR(quad.plain_mass() / oracle, 1.0, 1e-11) << p.h() << p.k() << p.alpha();
  }
}

TEST(Sphere, BallVolumeOneDimensionalOracle) {
  // For (1,1,1) the ball is |y| <= sqrt(1 - x^4) / 2.
  const double direct = gauss_kronrod<double, 61>::integrate(
      [](double x) { return std::sqrt(std::max(0.0, 1.0 - std::pow(x, 4))); }, -1.0, 1.0, 15, 1e-15);
  const double gamma_form = 0.5 * std::tgamma(0.25) * std::tgamma(1.5) / std::tgamma(1.75);
  EXPECT_NEAR(direct, gamma_form, 1e-10);
  EXPECT_NEAR(ball_volume_oracle(1, 1, 1), gamma_form, 1e-14);
}

TEST(Sphere, PsiMassMatchesCartesianIntegral) {
  // |grad_alpha d|^2 = psi, so int_S psi = Q int_{B_1} psi dx dy. For (1,1,1) the y integral
  // of x^2 / sqrt(x^4 + 4 y^2) is (x^2 / 2) asinh(2 Y / x^2) with Y = sqrt(1 - x^4) / 2.
  const GrushinParams p{1, 1, 1};
  const double ball = 4.0 * gauss_kronrod<double, 61>::integrate(
                                [](double x) {
                                  if (x == 0.0) return 0.0;
                                  return 0.5 * x * x * std::asinh(std::sqrt(1.0 - std::pow(x, 4)) / (x * x));
                                },
                                0.0, 1.0, 20, 1e-14);
  const SphereQuadrature quad = build_sphere_quadrature(p, 128);
  EXPECT_NEAR(quad.psi_mass(), 3.0 * ball, 1e-11);
  EXPECT_NEAR(quad.psi_mass(), std::beta(0.5, 0.75), 1e-11);
}

TEST(Sphere, RuleIntegratesSmoothFunctionsAccurately) {
  // int_{B_1} (x^2 + y^2): by the y-cross-section formula for (1,1,1),
  // 2 int_0^1 [2 x^2 Y + (2/3) Y^3] dx with Y = sqrt(1 - x^4) / 2.
  const GrushinParams p{1, 1, 1};
  const double oracle = 2.0 * gauss_kronrod<double, 61>::integrate(
                                  [](double x) {
                                    const double Y = 0.5 * std::sqrt(std::max(0.0, 1.0 - std::pow(x, 4)));
                                    return 2.0 * x * x * Y + 2.0 / 3.0 * Y * Y * Y;
                                  },
                                  0.0, 1.0, 15, 1e-15);
  const SphereQuadrature quad = build_sphere_quadrature(p, 64);
  const double polar = ball_integral(quad, 1.0, 32, [](const Point& q) {
    return q.x[0] * q.x[0] + q.y[0] * q.y[0];
  });
  EXPECT_NEAR(polar, oracle, 1e-9);
}

TEST(Sphere, RuleConvergesWithResolution) {
  // h = 1 with alpha = 2 is the hardest case for the phi rule.
  const GrushinParams p{1, 1, 2};
  const double oracle = p.Q() * ball_volume_oracle(1, 1, 2);
  double prev = 1.0;
  for (int res : {32, 64, 128}) {
    const double err = std::abs(build_sphere_quadrature(p, res).plain_mass() / oracle - 1.0);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-12);
}

TEST(Sphere, RejectsTooCoarse) {
  EXPECT_THROW(build_sphere_quadrature(GrushinParams(1, 1, 1), 4), Error);
}

TEST(Sphere, FormulaTableMentionsQ) {
  const std::string t = formula_table(GrushinParams(2, 1, 1));
  EXPECT_NE(t.find("Q"), std::string::npos);
  EXPECT_NE(t.find("4"), std::string::npos);
}

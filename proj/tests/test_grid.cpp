#include <gtest/gtest.h>

#include <cmath>

#include "grushin/builtins.hpp"
#include "grushin/errors.hpp"
#include "grushin/field.hpp"
#include "grushin/grid.hpp"

using namespace grushin;

TEST(GridSpec, Validation) {
  const GrushinParams p{1, 1, 1};
  EXPECT_THROW(GridSpec::centered(p, 1.0, 1.0, 16), Error);
  EXPECT_THROW(GridSpec::centered(p, 1.0, 1.0, 15), Error);
  EXPECT_THROW(GridSpec(p, {-1.0, -1.0}, {1.0, 1.0}, {18, 17}), Error);
  EXPECT_THROW(GridSpec(p, {-1.0, -1.0}, {0.5, 1.0}, {18, 17}), Error);
  EXPECT_THROW(GridSpec::centered(GrushinParams(2, 2, 1), 1.0, 1.0, 17), Error);
  const GridSpec g = GridSpec::centered(p, 1.0, 0.5, 17);
  EXPECT_EQ(g.size(), 289u);
  EXPECT_DOUBLE_EQ(g.spacing(0), 0.125);
  EXPECT_DOUBLE_EQ(g.coord(1, 16), 0.5);
}

TEST(GridSpec, IndexRoundTrip) {
  const GridSpec g = GridSpec::centered(GrushinParams(2, 1, 1), 1.0, 1.0, 17);
  for (std::size_t i = 0; i < g.size(); i += 97) EXPECT_EQ(g.index(g.multi_index(i)), i);
  EXPECT_TRUE(g.on_boundary(0));
  EXPECT_FALSE(g.on_boundary(g.index({8, 8, 8})));
}

TEST(Operator, QuadraticSolutionsAreReproducedExactly) {
  // Second differences are exact on quadratics, so -Delta_alpha u = f recovers u to roundoff.
  for (const GrushinParams p : {GrushinParams(1, 1, 1), GrushinParams(1, 1, 2), GrushinParams(2, 1, 1)}) {
    const GridSpec g = GridSpec::centered(p, 1.0, 1.0, p.n() == 2 ? 33 : 17);
    const auto exact = [&](const Point& q) {
      double s = 0.0;
      for (double v : q.x) s += v * v;
      return s + 3.0 * q.y[0] * q.y[0] - q.x[0] * q.y[0];
    };
    const auto rhs = [&](const Point& q) {
      // Delta_x: 2h; |x|^(2 alpha) Delta_y: 6 |x|^(2 alpha).
      double x2 = 0.0;
      for (double v : q.x) x2 += v * v;
      return -(2.0 * p.h() + 6.0 * std::pow(x2, p.alpha()));
    };
    const ScalarField b = ScalarField::sample(g, exact);
    const ScalarField u = solve_dirichlet(assemble_operator(g), ScalarField::sample(g, rhs), b);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(u[i] - b[i]));
    EXPECT_LT(err, 1e-11) << p.h() << p.k() << p.alpha();
  }
}

TEST(Operator, PotentialEntersWithMinusSign) {
  // -u'' - V u = 0 with u = cos(x), V = 1 on a box in x only: the error is O(h^2).
  const GrushinParams p{1, 1, 1};
  std::vector<double> errs;
  for (int n : {33, 65}) {
    const GridSpec g = GridSpec::centered(p, 1.0, 1.0, n);
    const ScalarField V = ScalarField::sample(g, [](const Point&) { return 1.0; });
    const ScalarField b = ScalarField::sample(g, [](const Point& q) { return std::cos(q.x[0]); });
    const ScalarField u = solve_dirichlet(assemble_operator(g, &V), ScalarField::zeros(g), b);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(u[i] - b[i]));
    errs.push_back(err);
  }
  EXPECT_LT(errs[1], 1e-4);
  EXPECT_NEAR(std::log2(errs[0] / errs[1]), 2.0, 0.2);
}

TEST(Eigen, SecondOrderConvergence) {
  const GrushinParams p{1, 1, 1};
  std::vector<double> lam;
  for (int n : {33, 65, 129}) {
    const Eigenpair e = solve_smallest_eigenpair(assemble_operator(GridSpec::centered(p, 1.0, 1.0, n)));
    lam.push_back(e.lambda);
    EXPECT_GT(e.u[GridSpec::centered(p, 1.0, 1.0, n).index({n / 2, n / 2, 0})], 0.0);
  }
  const double order = std::log2((lam[0] - lam[1]) / (lam[1] - lam[2]));
  EXPECT_NEAR(order, 2.0, 0.15);
}

TEST(Eigen, EuclideanBoxEigenvalue) {
  // alpha = 0 on [-1,1]^2: lambda = pi^2 / 2 with discrete value (4/h^2) sin^2(pi h / 4) * 2.
  const GrushinParams p{1, 1, 0};
  const int n = 65;
  const GridSpec g = GridSpec::centered(p, 1.0, 1.0, n);
  const OperatorMatrix A = assemble_operator(g);
  const Eigenpair e = solve_smallest_eigenpair(A);
  const double h = g.spacing(0);
  const double discrete = 2.0 * 4.0 / (h * h) * std::pow(std::sin(M_PI * h / 4.0), 2);
  EXPECT_NEAR(e.lambda, discrete, 1e-9);
  EXPECT_NEAR(rayleigh_quotient(A, e.u), e.lambda, 1e-9);
}

TEST(Gradient, GrushinScaling) {
  const GrushinParams p{1, 1, 2};
  const GridSpec g = GridSpec::centered(p, 1.0, 1.0, 33);
  const ScalarField u = ScalarField::sample(g, [](const Point& q) { return q.x[0] * q.y[0]; });
  const GradientField grad = grushin_gradient(u);
  for (std::size_t i = 0; i < g.size(); i += 37) {
    const Point q = g.point(i);
    EXPECT_NEAR(grad.raw[0][i], q.y[0], 1e-12);
    EXPECT_NEAR(grad.grushin[1][i], std::pow(std::abs(q.x[0]), 2) * q.x[0], 1e-12);
    EXPECT_NEAR(grad.squared_norm(i), q.y[0] * q.y[0] + std::pow(q.x[0], 6), 1e-12);
  }
}

TEST(Field, InterpolationIsExactForCubics) {
  const GrushinParams p{1, 1, 1};
  const GridSpec g = GridSpec::centered(p, 1.0, 1.0, 33);
  const Polynomial poly = Polynomial::parse(p, {"1*x1^3", "-2*x1*y1^2", "0.5*y1"});
  const GridFunction f(ScalarField::sample(g, [&](const Point& q) { return poly.value(q); }));
  for (const auto& c : std::vector<std::vector<double>>{{0.013, -0.27}, {0.5, 0.5}, {-0.77, 0.31}}) {
    const Point q = Point::from_flat(p, c);
    EXPECT_NEAR(f.value(q), poly.value(q), 1e-12);
  }
  EXPECT_TRUE(f.covers(Point::from_flat(p, {1.0, -1.0})));
  EXPECT_FALSE(f.covers(Point::from_flat(p, {1.01, 0.0})));
}

TEST(Builtins, PolynomialLaplacianAndGradient) {
  const GrushinParams p{1, 1, 1};
  const Polynomial poly = Polynomial::parse(p, {"1*x1^4", "-6*y1^2", "2*x1*y1"});
  const Point q = Point::from_flat(p, {0.3, -0.7});
  EXPECT_NEAR(poly.grushin_laplacian(q), 0.0, 1e-14);
  const auto g = poly.gradient(q);
  EXPECT_NEAR(g[0], 4 * 0.027 + 2 * -0.7, 1e-14);
  EXPECT_NEAR(g[1], -12 * -0.7 + 2 * 0.3, 1e-14);
  EXPECT_THROW(Polynomial::parse(p, {"1*z1"}), Error);
  EXPECT_THROW(Polynomial::parse(p, {"1*x2"}), Error);
}

TEST(Builtins, SingularPotentialSampling) {
  const GrushinParams p{1, 1, 1};
  const GridSpec g = GridSpec::centered(p, 1.0, 1.0, 17);
  const Potential V = Potential::radial_power(p, 1.0, -1.0);
  const ScalarField s = V.sample(g);
  for (double v : s.values()) EXPECT_TRUE(std::isfinite(v));
  EXPECT_THROW(Potential::radial_power(p, 1.0, -2.0), Error);
}

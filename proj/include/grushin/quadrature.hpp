#pragma once

#include <functional>
#include <vector>

namespace grushin {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Gauss-Lobatto-Legendre points on [-1, 1] (n >= 2), endpoints included.
std::vector<double> gauss_lobatto_points(int n);

/// Adaptive double-exponential quadrature on [a, b]; tolerant of integrable endpoint
/// singularities.
double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         double tol = 1e-13);

/// Weights of the derivative of order `order` at x0 from arbitrary nodes (Fornberg).
std::vector<double> finite_difference_weights(double x0, const std::vector<double>& nodes,
                                              int order);

}  // namespace grushin

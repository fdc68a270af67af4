#include "grushin/field.hpp"

#include <array>
#include <cmath>

#include "grushin/errors.hpp"

namespace grushin {

double grushin_gradient_sq(const GrushinParams& params, const Point& p,
                           const std::vector<double>& grad) {
  return grushin_gradient_dot(params, p, grad, grad);
}

double grushin_gradient_dot(const GrushinParams& params, const Point& p,
                            const std::vector<double>& gu, const std::vector<double>& gv) {
  const int h = params.h();
  double x2 = 0.0;
  for (double v : p.x) x2 += v * v;
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < h; ++i) sx += gu[i] * gv[i];
  for (int j = 0; j < params.k(); ++j) sy += gu[h + j] * gv[h + j];
  return sx + std::pow(x2, params.alpha()) * sy;
}

double xg_from_gradient(const GrushinParams& params, const Point& p,
                        const std::vector<double>& grad) {
  const int h = params.h();
  double s = 0.0;
  for (int i = 0; i < h; ++i) s += p.x[i] * grad[i];
  for (int j = 0; j < params.k(); ++j) s += (params.alpha() + 1.0) * p.y[j] * grad[h + j];
  return s;
}

GridFunction::GridFunction(ScalarField u)
    : u_(std::move(u)), grad_(grushin_gradient(u_)), lap_(grushin::grushin_laplacian(u_)) {}

namespace {

struct Stencil {
  int first;
  std::array<double, 4> w;
};

// Four-point Lagrange weights along one axis; the stencil is shifted inward at the edges.
Stencil axis_stencil(const GridSpec& g, int axis, double c) {
  const int n = g.nodes(axis);
  const double t = (c - g.lower(axis)) / g.spacing(axis);
  int i = static_cast<int>(std::floor(t));
  i = std::clamp(i, 1, n - 3);
  const double s = t - i;  // local coordinate, nodes at -1, 0, 1, 2
  Stencil st{i - 1, {}};
  st.w[0] = -s * (s - 1.0) * (s - 2.0) / 6.0;
  st.w[1] = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
  st.w[2] = -(s + 1.0) * s * (s - 2.0) / 2.0;
  st.w[3] = (s + 1.0) * s * (s - 1.0) / 6.0;
  return st;
}

}  // namespace

double GridFunction::interpolate(const std::vector<double>& data, const Point& p) const {
  const GridSpec& g = u_.grid();
  if (!g.contains(p)) fail(ErrorKind::invalid_argument, "interpolation point outside the grid");
  const auto c = p.flat();
  std::array<Stencil, 3> st{};
  for (int a = 0; a < g.dim(); ++a) st[a] = axis_stencil(g, a, c[a]);
  double sum = 0.0;
  if (g.dim() == 2) {
    for (int i = 0; i < 4; ++i) {
      const std::size_t base = static_cast<std::size_t>(st[0].first + i) * g.stride(0) +
                               static_cast<std::size_t>(st[1].first);
      double row = 0.0;
      for (int j = 0; j < 4; ++j) row += st[1].w[j] * data[base + j];
      sum += st[0].w[i] * row;
    }
  } else {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const std::size_t base = static_cast<std::size_t>(st[0].first + i) * g.stride(0) +
                                 static_cast<std::size_t>(st[1].first + j) * g.stride(1) +
                                 static_cast<std::size_t>(st[2].first);
        double row = 0.0;
        for (int l = 0; l < 4; ++l) row += st[2].w[l] * data[base + l];
        sum += st[0].w[i] * st[1].w[j] * row;
      }
    }
  }
  return sum;
}

double GridFunction::value(const Point& p) const { return interpolate(u_.values(), p); }

std::vector<double> GridFunction::gradient(const Point& p) const {
  std::vector<double> out(grad_.raw.size());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = interpolate(grad_.raw[a], p);
  return out;
}

double GridFunction::grushin_laplacian(const Point& p) const { return interpolate(lap_.values(), p); }

AnalyticField::AnalyticField(GrushinParams params, Value value, Gradient gradient, Value laplacian)
    : params_(params),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      laplacian_(std::move(laplacian)) {}

}  // namespace grushin

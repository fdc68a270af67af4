#pragma once

// Pointwise access to a function, its Euclidean gradient and Delta_alpha. Grid data is read
// through tensor cubic interpolation; closed-form functions are wrapped directly.

#include <functional>
#include <memory>
#include <vector>

#include "grushin/geometry.hpp"
#include "grushin/grid.hpp"

namespace grushin {

class FieldEvaluator {
 public:
  virtual ~FieldEvaluator() = default;
  virtual const GrushinParams& params() const = 0;
  virtual double value(const Point& p) const = 0;
  /// Euclidean partials, x components first, then y.
  virtual std::vector<double> gradient(const Point& p) const = 0;
  virtual double grushin_laplacian(const Point& p) const = 0;
  /// Whether the evaluator can be queried at p.
  virtual bool covers(const Point&) const { return true; }
};

/// |grad_alpha u|^2 from a Euclidean gradient at p.
double grushin_gradient_sq(const GrushinParams& params, const Point& p,
                           const std::vector<double>& grad);
/// grad_alpha u . grad_alpha v.
double grushin_gradient_dot(const GrushinParams& params, const Point& p,
                            const std::vector<double>& gu, const std::vector<double>& gv);
/// X_G u = x . grad_x u + (alpha+1) y . grad_y u.
double xg_from_gradient(const GrushinParams& params, const Point& p,
                        const std::vector<double>& grad);

/// Tensor cubic interpolation of a grid field, its finite-difference gradient and Laplacian.
class GridFunction final : public FieldEvaluator {
 public:
  explicit GridFunction(ScalarField u);

  const GrushinParams& params() const override { return u_.grid().params(); }
  double value(const Point& p) const override;
  std::vector<double> gradient(const Point& p) const override;
  double grushin_laplacian(const Point& p) const override;
  bool covers(const Point& p) const override { return u_.grid().contains(p); }

  const ScalarField& field() const { return u_; }
  const GradientField& nodal_gradient() const { return grad_; }

  /// Cubic interpolation of arbitrary nodal data on the same grid.
  double interpolate(const std::vector<double>& data, const Point& p) const;

 private:
  ScalarField u_;
  GradientField grad_;
  ScalarField lap_;
};

class AnalyticField final : public FieldEvaluator {
 public:
  using Value = std::function<double(const Point&)>;
  using Gradient = std::function<std::vector<double>(const Point&)>;

  AnalyticField(GrushinParams params, Value value, Gradient gradient, Value laplacian);

  const GrushinParams& params() const override { return params_; }
  double value(const Point& p) const override { return value_(p); }
  std::vector<double> gradient(const Point& p) const override { return gradient_(p); }
  double grushin_laplacian(const Point& p) const override { return laplacian_(p); }

 private:
  GrushinParams params_;
  Value value_;
  Gradient gradient_;
  Value laplacian_;
};

}  // namespace grushin

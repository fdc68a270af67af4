#pragma once

// Closed-form fields used as boundary data, potentials and test inputs.

#include <string>
#include <vector>

#include "grushin/field.hpp"
#include "grushin/grid.hpp"

namespace grushin {

struct Monomial {
  double coef = 0.0;
  std::vector<int> exps;  // one exponent per axis, x first
};

class Polynomial {
 public:
  Polynomial(GrushinParams params, std::vector<Monomial> terms);

  /// Parses terms such as "2", "-6*y1^2", "0.5*x1*y1". Variables x1..xh, y1..yk.
  static Polynomial parse(const GrushinParams& params, const std::vector<std::string>& terms);

  double value(const Point& p) const;
  std::vector<double> gradient(const Point& p) const;
  /// Delta_alpha applied exactly.
  double grushin_laplacian(const Point& p) const;
  AnalyticField as_field() const;

  const GrushinParams& params() const { return params_; }
  const std::vector<Monomial>& terms() const { return terms_; }

 private:
  GrushinParams params_;
  std::vector<Monomial> terms_;
};

/// Builtin potential family: zero, constant c, polynomial, or c |z|^beta (Euclidean |z|).
class Potential {
 public:
  enum class Kind { zero, constant, polynomial, radial_power };

  static Potential zero(const GrushinParams& params);
  static Potential constant(const GrushinParams& params, double c);
  static Potential polynomial(Polynomial poly);
  static Potential radial_power(const GrushinParams& params, double c, double beta);

  Kind kind() const { return kind_; }
  double value(const Point& p) const;
  std::vector<double> gradient(const Point& p) const;
  /// Nodal samples. A singular radial power at z = 0 is replaced by its mean over a 4^d
  /// sub-sample of the surrounding dual cell.
  ScalarField sample(const GridSpec& grid) const;
  AnalyticField as_field() const;
  std::string describe() const;

 private:
  Potential(GrushinParams params, Kind kind) : params_(params), kind_(kind) {}
  GrushinParams params_;
  Kind kind_;
  double c_ = 0.0, beta_ = 0.0;
  std::vector<Polynomial> poly_;  // zero or one entry
};

}  // namespace grushin

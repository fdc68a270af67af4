#include "grushin/builtins.hpp"

#include <cmath>
#include <sstream>

#include "grushin/errors.hpp"

namespace grushin {

namespace {

double ipow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

double x_norm_sq(const Point& p) {
  double s = 0.0;
  for (double v : p.x) s += v * v;
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

Polynomial::Polynomial(GrushinParams params, std::vector<Monomial> terms)
    : params_(params), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    require(static_cast<int>(t.exps.size()) == params_.n(), "monomial has wrong number of exponents");
    for (int e : t.exps) require(e >= 0, "monomial exponents must be nonnegative");
  }
}

Polynomial Polynomial::parse(const GrushinParams& params, const std::vector<std::string>& terms) {
  std::vector<Monomial> out;
  for (const auto& raw : terms) {
    const std::string term = trim(raw);
    if (term.empty()) fail(ErrorKind::config, "empty polynomial term");
    Monomial m{1.0, std::vector<int>(params.n(), 0)};
    std::stringstream ss(term);
    std::string factor;
    bool first = true;
    while (std::getline(ss, factor, '*')) {
      factor = trim(factor);
      if (factor.empty()) fail(ErrorKind::config, "malformed polynomial term '" + term + "'");
      const char c0 = factor[0];
      const bool var = (c0 == 'x' || c0 == 'y');
      const bool negvar = factor.size() > 1 && c0 == '-' && (factor[1] == 'x' || factor[1] == 'y');
      if (var || negvar) {
        if (negvar) {
          m.coef = -m.coef;
          factor = factor.substr(1);
        }
        const auto caret = factor.find('^');
        const std::string name = factor.substr(0, caret);
        int power = 1;
        if (caret != std::string::npos) {
          try {
            std::size_t used = 0;
            power = std::stoi(factor.substr(caret + 1), &used);
            if (used != factor.size() - caret - 1) throw std::invalid_argument(factor);
          } catch (const std::exception&) {
            fail(ErrorKind::config, "bad exponent in polynomial term '" + term + "'");
          }
          if (power < 0) fail(ErrorKind::config, "negative exponent in polynomial term '" + term + "'");
        }
        int index = -1;
        try {
          std::size_t used = 0;
          index = std::stoi(name.substr(1), &used) - 1;
          if (used != name.size() - 1) index = -1;
        } catch (const std::exception&) {
          index = -1;
        }
        const int limit = name[0] == 'x' ? params.h() : params.k();
        if (index < 0 || index >= limit)
          fail(ErrorKind::config, "unknown variable '" + name + "' in polynomial term '" + term + "'");
        m.exps[(name[0] == 'x' ? 0 : params.h()) + index] += power;
      } else {
        if (!first) fail(ErrorKind::config, "coefficient must lead polynomial term '" + term + "'");
        try {
          std::size_t used = 0;
          m.coef *= std::stod(factor, &used);
          if (used != factor.size()) throw std::invalid_argument(factor);
        } catch (const std::exception&) {
          fail(ErrorKind::config, "bad coefficient in polynomial term '" + term + "'");
        }
      }
      first = false;
    }
    out.push_back(std::move(m));
  }
  return Polynomial(params, std::move(out));
}

double Polynomial::value(const Point& p) const {
  const auto c = p.flat();
  double s = 0.0;
  for (const auto& t : terms_) {
    double v = t.coef;
    for (std::size_t a = 0; a < c.size(); ++a) v *= ipow(c[a], t.exps[a]);
    s += v;
  }
  return s;
}

std::vector<double> Polynomial::gradient(const Point& p) const {
  const auto c = p.flat();
  std::vector<double> g(c.size(), 0.0);
  for (const auto& t : terms_) {
    for (std::size_t d = 0; d < c.size(); ++d) {
      if (t.exps[d] == 0) continue;
      double v = t.coef * t.exps[d];
      for (std::size_t a = 0; a < c.size(); ++a) v *= ipow(c[a], a == d ? t.exps[a] - 1 : t.exps[a]);
      g[d] += v;
    }
  }
  return g;
}

double Polynomial::grushin_laplacian(const Point& p) const {
  const auto c = p.flat();
  const double w = std::pow(x_norm_sq(p), params_.alpha());
  double s = 0.0;
  for (const auto& t : terms_) {
    for (std::size_t d = 0; d < c.size(); ++d) {
      if (t.exps[d] < 2) continue;
      double v = t.coef * t.exps[d] * (t.exps[d] - 1);
      for (std::size_t a = 0; a < c.size(); ++a) v *= ipow(c[a], a == d ? t.exps[a] - 2 : t.exps[a]);
      s += static_cast<int>(d) < params_.h() ? v : w * v;
    }
  }
  return s;
}

AnalyticField Polynomial::as_field() const {
  const Polynomial self = *this;
  return AnalyticField(
      params_, [self](const Point& p) { return self.value(p); },
      [self](const Point& p) { return self.gradient(p); },
      [self](const Point& p) { return self.grushin_laplacian(p); });
}

Potential Potential::zero(const GrushinParams& params) { return Potential(params, Kind::zero); }

Potential Potential::constant(const GrushinParams& params, double c) {
  Potential v(params, Kind::constant);
  v.c_ = c;
  return v;
}

Potential Potential::polynomial(Polynomial poly) {
  Potential v(poly.params(), Kind::polynomial);
  v.poly_.push_back(std::move(poly));
  return v;
}

Potential Potential::radial_power(const GrushinParams& params, double c, double beta) {
  require(beta > -2.0, "radial-power exponent must exceed -2");
  Potential v(params, Kind::radial_power);
  v.c_ = c;
  v.beta_ = beta;
  return v;
}

double Potential::value(const Point& p) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::constant: return c_;
    case Kind::polynomial: return poly_.front().value(p);
    case Kind::radial_power: {
      double r2 = 0.0;
      for (double v : p.flat()) r2 += v * v;
      return c_ * std::pow(r2, 0.5 * beta_);
    }
  }
  return 0.0;
}

std::vector<double> Potential::gradient(const Point& p) const {
  switch (kind_) {
    case Kind::zero:
    case Kind::constant: return std::vector<double>(params_.n(), 0.0);
    case Kind::polynomial: return poly_.front().gradient(p);
    case Kind::radial_power: {
      auto z = p.flat();
      double r2 = 0.0;
      for (double v : z) r2 += v * v;
      const double f = r2 > 0.0 ? c_ * beta_ * std::pow(r2, 0.5 * beta_ - 1.0) : 0.0;
      for (double& v : z) v *= f;
      return z;
    }
  }
  return {};
}

ScalarField Potential::sample(const GridSpec& grid) const {
  ScalarField out = ScalarField::zeros(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point p = grid.point(i);
    double r2 = 0.0;
    for (double v : p.flat()) r2 += v * v;
    if (kind_ == Kind::radial_power && beta_ < 0.0 && r2 == 0.0) {
      const int d = grid.dim();
      const int per = 4, total = d == 2 ? per * per : per * per * per;
      double sum = 0.0;
      for (int s = 0; s < total; ++s) {
        std::vector<double> z(d);
        int rem = s;
        for (int a = 0; a < d; ++a) {
          const int j = rem % per;
          rem /= per;
          z[a] = ((j + 0.5) / per - 0.5) * grid.spacing(a);
        }
        sum += value(Point::from_flat(params_, z));
      }
      out[i] = sum / total;
    } else {
      out[i] = value(p);
    }
  }
  return out;
}

AnalyticField Potential::as_field() const {
  const Potential self = *this;
  return AnalyticField(
      params_, [self](const Point& p) { return self.value(p); },
      [self](const Point& p) { return self.gradient(p); },
      [](const Point&) { return 0.0; });
}

std::string Potential::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::zero: os << "zero"; break;
    case Kind::constant: os << "constant(" << c_ << ")"; break;
    case Kind::polynomial: os << "polynomial(" << poly_.front().terms().size() << " terms)"; break;
    case Kind::radial_power: os << "radial-power(c=" << c_ << ", beta=" << beta_ << ")"; break;
  }
  return os.str();
}

}  // namespace grushin

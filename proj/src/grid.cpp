#include "grushin/grid.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <sstream>

#include "grushin/errors.hpp"

namespace grushin {

namespace {

constexpr std::size_t kDirectSolveLimit = 200000;

}  // namespace

GridSpec::GridSpec(GrushinParams params, std::vector<double> lower, std::vector<double> upper,
                   std::vector<int> nodes)
    : params_(params), lower_(std::move(lower)), upper_(std::move(upper)), nodes_(std::move(nodes)) {
  const int d = params_.n();
  require(d == 2 || d == 3, "grid solver supports h + k in {2, 3}");
  require(static_cast<int>(lower_.size()) == d && static_cast<int>(upper_.size()) == d &&
              static_cast<int>(nodes_.size()) == d,
          "grid extents and node counts must have one entry per axis");
  spacing_.resize(d);
  for (int a = 0; a < d; ++a) {
    require(std::isfinite(lower_[a]) && std::isfinite(upper_[a]) && lower_[a] < upper_[a],
            "grid axis " + std::to_string(a) + ": lower must be below upper");
    require(nodes_[a] >= 17 && nodes_[a] % 2 == 1,
            "grid axis " + std::to_string(a) + ": node count must be odd and at least 17");
    spacing_[a] = (upper_[a] - lower_[a]) / (nodes_[a] - 1);
    if (a < params_.h() && lower_[a] < 0.0 && upper_[a] > 0.0) {
      const double steps = -lower_[a] / spacing_[a];
      require(std::abs(steps - std::round(steps)) < 1e-9,
              "grid axis " + std::to_string(a) + ": no grid line on x = 0");
    }
  }
  std::size_t s = 1;
  for (int a = d - 1; a >= 0; --a) {
    stride_[a] = s;
    s *= static_cast<std::size_t>(nodes_[a]);
  }
  size_ = s;
}

GridSpec GridSpec::centered(const GrushinParams& params, double half_x, double half_y, int n) {
  std::vector<double> lo, hi;
  for (int a = 0; a < params.n(); ++a) {
    const double h = a < params.h() ? half_x : half_y;
    lo.push_back(-h);
    hi.push_back(h);
  }
  return GridSpec(params, lo, hi, std::vector<int>(params.n(), n));
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (double s : spacing_) v *= s;
  return v;
}

std::size_t GridSpec::index(const std::array<int, 3>& idx) const {
  std::size_t f = 0;
  for (int a = 0; a < dim(); ++a) f += static_cast<std::size_t>(idx[a]) * stride_[a];
  return f;
}

std::array<int, 3> GridSpec::multi_index(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    idx[a] = static_cast<int>(flat / stride_[a]);
    flat %= stride_[a];
  }
  return idx;
}

bool GridSpec::on_boundary(std::size_t flat) const {
  const auto idx = multi_index(flat);
  for (int a = 0; a < dim(); ++a)
    if (idx[a] == 0 || idx[a] == nodes_[a] - 1) return true;
  return false;
}

Point GridSpec::point(std::size_t flat) const {
  const auto idx = multi_index(flat);
  Point p;
  for (int a = 0; a < dim(); ++a) (a < params_.h() ? p.x : p.y).push_back(coord(a, idx[a]));
  return p;
}

double GridSpec::x_norm(std::size_t flat) const {
  const auto idx = multi_index(flat);
  double s = 0.0;
  for (int a = 0; a < params_.h(); ++a) {
    const double c = coord(a, idx[a]);
    s += c * c;
  }
  return std::sqrt(s);
}

bool GridSpec::contains(const Point& p) const {
  const auto c = p.flat();
  for (int a = 0; a < dim(); ++a) {
    const double tol = 1e-12 * spacing_[a];
    if (c[a] < lower_[a] - tol || c[a] > upper_[a] + tol) return false;
  }
  return true;
}

ScalarField::ScalarField(GridSpec grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(values_.size() == grid_.size(), "field values do not match the grid size");
}

ScalarField ScalarField::zeros(const GridSpec& grid) {
  return ScalarField(grid, std::vector<double>(grid.size(), 0.0));
}

ScalarField ScalarField::sample(const GridSpec& grid, const std::function<double(const Point&)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid.point(i));
  return ScalarField(grid, std::move(v));
}

OperatorMatrix assemble_operator(const GridSpec& grid, const ScalarField* V) {
  if (V) require(V->grid() == grid, "potential is sampled on a different grid");
  OperatorMatrix op{grid, {}, {}, {}, std::vector<long>(grid.size(), -1)};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.on_boundary(i)) {
      op.interior_index[i] = static_cast<long>(op.interior_nodes.size());
      op.interior_nodes.push_back(i);
    }
  }
  const std::size_t n = op.interior_nodes.size();
  const int alpha = grid.params().alpha();
  std::vector<Eigen::Triplet<double>> inner, outer;
  inner.reserve(n * (2 * grid.dim() + 1));
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t node = op.interior_nodes[row];
    const double x2 = std::pow(grid.x_norm(node), 2);
    double diag = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      double c = 1.0 / (grid.spacing(a) * grid.spacing(a));
      if (!grid.is_x_axis(a)) c *= std::pow(x2, alpha);
      diag += 2.0 * c;
      for (int dir : {-1, 1}) {
        const std::size_t nb = dir < 0 ? node - grid.stride(a) : node + grid.stride(a);
        const long col = op.interior_index[nb];
        if (col >= 0)
          inner.emplace_back(static_cast<int>(row), static_cast<int>(col), -c);
        else
          outer.emplace_back(static_cast<int>(row), static_cast<int>(nb), -c);
      }
    }
    if (V) diag -= (*V)[node];
    inner.emplace_back(static_cast<int>(row), static_cast<int>(row), diag);
  }
  op.matrix.resize(static_cast<int>(n), static_cast<int>(n));
  op.matrix.setFromTriplets(inner.begin(), inner.end());
  op.boundary_coupling.resize(static_cast<int>(n), static_cast<int>(grid.size()));
  op.boundary_coupling.setFromTriplets(outer.begin(), outer.end());
  return op;
}

namespace {

Eigen::VectorXd gather_interior(const OperatorMatrix& A, const ScalarField& f) {
  Eigen::VectorXd v(A.interior_nodes.size());
  for (std::size_t r = 0; r < A.interior_nodes.size(); ++r) v[r] = f[A.interior_nodes[r]];
  return v;
}

}  // namespace

ScalarField solve_dirichlet(const OperatorMatrix& A, const ScalarField& rhs,
                            const ScalarField& boundary) {
  require(rhs.grid() == A.grid && boundary.grid() == A.grid,
          "solve_dirichlet: fields must live on the operator grid");
  Eigen::VectorXd ub = Eigen::Map<const Eigen::VectorXd>(boundary.values().data(),
                                                         static_cast<long>(A.grid.size()));
  for (std::size_t i = 0; i < A.grid.size(); ++i)
    if (A.interior_index[i] >= 0) ub[static_cast<long>(i)] = 0.0;
  const Eigen::VectorXd b = gather_interior(A, rhs) - A.boundary_coupling * ub;

  Eigen::VectorXd x;
  if (A.interior_nodes.size() <= kDirectSolveLimit) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A.matrix);
    if (ldlt.info() != Eigen::Success) fail(ErrorKind::convergence, "solve_dirichlet: factorization failed");
    const double dmin = ldlt.vectorD().minCoeff();
    if (!(dmin > 0.0)) {
      std::ostringstream os;
      os << "solve_dirichlet: operator is not positive definite (smallest LDLT pivot " << dmin << ")";
      fail(ErrorKind::convergence, os.str());
    }
    x = ldlt.solve(b);
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(A.matrix);
    cg.setTolerance(1e-12);
    cg.setMaxIterations(20000);
    x = cg.solve(b);
    if (cg.info() != Eigen::Success) {
      std::ostringstream os;
      os << "solve_dirichlet: conjugate gradients did not converge after " << cg.iterations()
         << " iterations (estimated error " << cg.error() << ")";
      fail(ErrorKind::convergence, os.str());
    }
  }
  const double bnorm = b.norm();
  const double res = (A.matrix * x - b).norm() / (bnorm > 0.0 ? bnorm : 1.0);
  if (res > 1e-10) {
    std::ostringstream os;
    os << "solve_dirichlet: relative residual " << res << " exceeds 1e-10";
    fail(ErrorKind::convergence, os.str());
  }
  ScalarField u = boundary;
  for (std::size_t r = 0; r < A.interior_nodes.size(); ++r) u[A.interior_nodes[r]] = x[static_cast<long>(r)];
  return u;
}

Eigenpair solve_smallest_eigenpair(const OperatorMatrix& A, int max_iterations) {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A.matrix);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0))
    fail(ErrorKind::convergence, "solve_smallest_eigenpair: operator is not positive definite");
  const long n = static_cast<long>(A.interior_nodes.size());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double lambda = 0.0;
  int it = 0;
  for (; it < max_iterations; ++it) {
    Eigen::VectorXd w = ldlt.solve(v);
    v = w.normalized();
    const Eigen::VectorXd Av = A.matrix * v;
    lambda = v.dot(Av);
    if ((Av - lambda * v).norm() <= 1e-9) break;
  }
  if (it == max_iterations) {
    std::ostringstream os;
    os << "solve_smallest_eigenpair: no convergence after " << max_iterations << " iterations";
    fail(ErrorKind::convergence, os.str());
  }
  // Sign: positive at the node nearest the domain center.
  std::array<int, 3> mid{0, 0, 0};
  for (int a = 0; a < A.grid.dim(); ++a) mid[a] = A.grid.nodes(a) / 2;
  const long center = A.interior_index[A.grid.index(mid)];
  if (center >= 0 && v[center] < 0.0) v = -v;
  v /= std::sqrt(A.grid.cell_volume());

  ScalarField u = ScalarField::zeros(A.grid);
  for (long r = 0; r < n; ++r) u[A.interior_nodes[static_cast<std::size_t>(r)]] = v[r];
  return {lambda, std::move(u), it + 1};
}

double rayleigh_quotient(const OperatorMatrix& A, const ScalarField& u) {
  const Eigen::VectorXd v = gather_interior(A, u);
  return v.dot(A.matrix * v) / v.squaredNorm();
}

double GradientField::squared_norm(std::size_t node) const {
  double s = 0.0;
  for (const auto& comp : grushin) s += comp[node] * comp[node];
  return s;
}

namespace {

// First derivative along an axis at a node: central inside, one-sided second order at the ends.
double axis_derivative(const std::vector<double>& u, const GridSpec& g, std::size_t node, int axis,
                       int idx) {
  const std::size_t s = g.stride(axis);
  const double h = g.spacing(axis);
  const int n = g.nodes(axis);
  if (idx == 0) return (-3.0 * u[node] + 4.0 * u[node + s] - u[node + 2 * s]) / (2.0 * h);
  if (idx == n - 1) return (3.0 * u[node] - 4.0 * u[node - s] + u[node - 2 * s]) / (2.0 * h);
  return (u[node + s] - u[node - s]) / (2.0 * h);
}

double axis_second_derivative(const std::vector<double>& u, const GridSpec& g, std::size_t node,
                              int axis, int idx) {
  const std::size_t s = g.stride(axis);
  const double h2 = g.spacing(axis) * g.spacing(axis);
  const int n = g.nodes(axis);
  if (idx == 0) return (2.0 * u[node] - 5.0 * u[node + s] + 4.0 * u[node + 2 * s] - u[node + 3 * s]) / h2;
  if (idx == n - 1)
    return (2.0 * u[node] - 5.0 * u[node - s] + 4.0 * u[node - 2 * s] - u[node - 3 * s]) / h2;
  return (u[node + s] - 2.0 * u[node] + u[node - s]) / h2;
}

}  // namespace

GradientField grushin_gradient(const ScalarField& u) {
  const GridSpec& g = u.grid();
  const int alpha = g.params().alpha();
  GradientField out{g, std::vector<std::vector<double>>(g.dim(), std::vector<double>(g.size())),
                    std::vector<std::vector<double>>(g.dim(), std::vector<double>(g.size()))};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.multi_index(i);
    const double xa = std::pow(g.x_norm(i), alpha);
    for (int a = 0; a < g.dim(); ++a) {
      const double d = axis_derivative(u.values(), g, i, a, idx[a]);
      out.raw[a][i] = d;
      out.grushin[a][i] = g.is_x_axis(a) ? d : xa * d;
    }
  }
  return out;
}

ScalarField grushin_laplacian(const ScalarField& u) {
  const GridSpec& g = u.grid();
  const int alpha = g.params().alpha();
  ScalarField out = ScalarField::zeros(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.multi_index(i);
    const double w = std::pow(g.x_norm(i), 2 * alpha);
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double d2 = axis_second_derivative(u.values(), g, i, a, idx[a]);
      s += g.is_x_axis(a) ? d2 : w * d2;
    }
    out[i] = s;
  }
  return out;
}

}  // namespace grushin

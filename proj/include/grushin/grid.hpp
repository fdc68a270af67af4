#pragma once

// Finite differences for -Delta_alpha u - V u on axis-aligned boxes in R^(h+k), h + k <= 3.
// Axes are ordered x_1..x_h, y_1..y_k.

#include <Eigen/Sparse>
#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "grushin/geometry.hpp"

namespace grushin {

class GridSpec {
 public:
  /// Validates: h + k in {2, 3}, odd node counts >= 17, lower < upper, and a grid line on
  /// x_i = 0 whenever an x-axis straddles zero.
  GridSpec(GrushinParams params, std::vector<double> lower, std::vector<double> upper,
           std::vector<int> nodes);

  /// Symmetric box [-hx, hx]^h x [-hy, hy]^k with n nodes per axis.
  static GridSpec centered(const GrushinParams& params, double half_x, double half_y, int n);

  const GrushinParams& params() const noexcept { return params_; }
  int dim() const noexcept { return static_cast<int>(nodes_.size()); }
  double lower(int axis) const { return lower_[axis]; }
  double upper(int axis) const { return upper_[axis]; }
  int nodes(int axis) const { return nodes_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double coord(int axis, int i) const { return lower_[axis] + i * spacing_[axis]; }
  std::size_t size() const noexcept { return size_; }
  double cell_volume() const;
  bool is_x_axis(int axis) const { return axis < params_.h(); }

  std::size_t index(const std::array<int, 3>& idx) const;
  std::array<int, 3> multi_index(std::size_t flat) const;
  std::size_t stride(int axis) const { return stride_[axis]; }
  bool on_boundary(std::size_t flat) const;
  Point point(std::size_t flat) const;
  /// |x| at a node.
  double x_norm(std::size_t flat) const;
  /// True when p lies in the closed box.
  bool contains(const Point& p) const;

  friend bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.params_ == b.params_ && a.lower_ == b.lower_ && a.upper_ == b.upper_ &&
           a.nodes_ == b.nodes_;
  }

 private:
  GrushinParams params_;
  std::vector<double> lower_, upper_, spacing_;
  std::vector<int> nodes_;
  std::array<std::size_t, 3> stride_{};
  std::size_t size_ = 0;
};

class ScalarField {
 public:
  ScalarField(GridSpec grid, std::vector<double> values);
  static ScalarField zeros(const GridSpec& grid);
  static ScalarField sample(const GridSpec& grid, const std::function<double(const Point&)>& f);

  const GridSpec& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  bool is_boundary(std::size_t i) const { return grid_.on_boundary(i); }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// -Delta_alpha - V restricted to interior nodes, Dirichlet nodes eliminated.
struct OperatorMatrix {
  GridSpec grid;
  Eigen::SparseMatrix<double> matrix;             // interior x interior
  Eigen::SparseMatrix<double> boundary_coupling;  // interior x all nodes, boundary columns only
  std::vector<std::size_t> interior_nodes;        // interior index -> node
  std::vector<long> interior_index;               // node -> interior index, -1 on the boundary
};

OperatorMatrix assemble_operator(const GridSpec& grid, const ScalarField* V = nullptr);

/// Solves A u_I = rhs_I - A_IB u_B; boundary values are copied from `boundary`.
ScalarField solve_dirichlet(const OperatorMatrix& A, const ScalarField& rhs,
                            const ScalarField& boundary);

struct Eigenpair {
  double lambda;
  ScalarField u;  // unit grid-L2 norm, positive at the domain center, zero on the boundary
  int iterations;
};

/// Smallest Dirichlet eigenpair by inverse iteration on a sparse LDLT factorization.
Eigenpair solve_smallest_eigenpair(const OperatorMatrix& A, int max_iterations = 5000);

/// u^T A u / u^T u over interior nodes.
double rayleigh_quotient(const OperatorMatrix& A, const ScalarField& u);

/// Nodal gradients: central differences inside, one-sided second order on the boundary layer.
struct GradientField {
  GridSpec grid;
  std::vector<std::vector<double>> raw;      // Euclidean partial derivative per axis
  std::vector<std::vector<double>> grushin;  // y components scaled by |x|^alpha

  /// |grad_alpha u|^2 at a node.
  double squared_norm(std::size_t node) const;
};

GradientField grushin_gradient(const ScalarField& u);

/// Nodal Delta_alpha u; one-sided second differences on the boundary layer.
ScalarField grushin_laplacian(const ScalarField& u);

}  // namespace grushin

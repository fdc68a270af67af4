#pragma once

// Spectrum of the spherical operator -L_Theta. Separation of variables on the sub-spheres
// S^(h-1), S^(k-1) leaves a weighted Sturm-Liouville problem in phi,
//
//   -(p f')' + q f = mu p f,  p = |sin phi|^a |cos phi|^(k-1),  a = (h-1+alpha)/(alpha+1),
//   q = p (l(l+h-2) / ((alpha+1)^2 sin^2 phi) + m(m+k-2) / cos^2 phi),
//
// discretized with continuous high-order Lagrange elements. Near sin(phi) = 0 the elements
// live in the variable s = |sin phi|^(1/(alpha+1)), where eigenfunctions are smooth.

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "grushin/detail/patches.hpp"
#include "grushin/geometry.hpp"

namespace grushin {

/// Symmetry class of an h = 1 problem about phi = 0.
enum class Parity { none, even, odd };

struct SectorSpec {
  GrushinParams params;
  int l = 0;  // degree on S^(h-1); must be 0 when h = 1
  int m = 0;  // degree on S^(k-1); must be 0 when k = 1
  Parity parity = Parity::none;  // only for h = 1
};

/// Throws unless the sector satisfies the constraints documented on SectorSpec.
void validate_sector(const SectorSpec& sector);

struct SLProblem {
  SectorSpec sector;
  double lo = 0.0, hi = 0.0;  // phi interval (half interval for parity problems)
  bool periodic = false;
  bool pin_start = false, pin_end = false;  // essential zero at the chain ends
  int elements_per_patch = 8;
  int degree = 10;
  std::vector<detail::AngularPatch> patches{};

  double p(double phi) const;
  double q(double phi) const;
  double rho(double phi) const { return p(phi); }
  /// First-order coefficient of the reduced operator, a cot(phi) - (k-1) tan(phi).
  double drift(double phi) const;
};

SLProblem reduce_to_ode(const SectorSpec& sector, int elements_per_patch = 8, int degree = 10);

namespace detail {
struct FemSpace;
}

struct SpectralResult {
  SectorSpec sector;
  std::vector<double> eigenvalues{};
  std::vector<Eigen::VectorXd> coefficients{};  // nodal values on the fine mesh
  std::shared_ptr<const detail::FemSpace> space{};
  int elements_coarse = 0, elements_fine = 0, degree = 0;
  std::vector<double> coarse_eigenvalues{};
  double refinement_delta = 0.0;  // max |mu_coarse - mu_fine| / max(1, mu_fine)
  double tolerance = 0.0;

  std::size_t size() const { return eigenvalues.size(); }
  /// Radial-angle factor f_i(phi), normalized so (alpha+1)^-k int p f_i^2 over the full
  /// phi range is 1. Accepts the full range of the case, including phi < 0 for parity problems.
  double eigenfunction(std::size_t i, double phi) const;
  /// b(f, f) / int p f^2 recomputed with an independent, finer quadrature.
  double rayleigh_quotient(std::size_t i) const;
};

/// Solves on `elements_per_patch` and twice as many elements; throws a convergence error
/// when the first n_eigs eigenvalues move by more than tol * max(1, mu).
SpectralResult sl_solve(const SLProblem& problem, int n_eigs, double tol = 1e-8);

double mu_from_degree(const GrushinParams& params, int n);
double ell_from_mu(const GrushinParams& params, double mu);

struct FormulaMatch {
  int n = 0;
  double gap = 0.0;
};

std::vector<FormulaMatch> classify_against_formula(const GrushinParams& params,
                                                   const std::vector<double>& mu);
std::vector<FormulaMatch> classify_against_formula(const SpectralResult& result);

/// Number of real spherical harmonics of degree `degree` on S^(dim-1), dim in {1, 2, 3}.
int harmonic_count(int dim, int degree);
/// Real orthonormal spherical harmonic on S^(dim-1) at the hyperspherical angles used by
/// unit_vector (polar angle first). For dim = 1 the value is 1.
double sphere_harmonic(int dim, int degree, int index, const std::vector<double>& angles);

}  // namespace grushin

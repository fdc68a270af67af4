#pragma once

// Rescaled families u(delta_eps .), their expansion in eigenfunctions of -L_Theta and the
// distance to the blow-up limit profile.

#include <vector>

#include "grushin/field.hpp"
#include "grushin/geometry.hpp"
#include "grushin/spectrum.hpp"

namespace grushin {

/// Eigenfunctions of -L_Theta on the whole gauge sphere, ordered by eigenvalue, each the
/// product of a phi factor and real spherical harmonics on S^(h-1) and S^(k-1).
class AngularBasis {
 public:
  struct Entry {
    double mu;
    std::size_t sector;     // index into sectors()
    std::size_t eig;        // eigenvalue index within the sector
    int theta_harmonic;     // harmonic index on S^(h-1)
    int eta_harmonic;       // harmonic index on S^(k-1)
  };

  /// Smallest eigenfunctions, extended to whole eigenspaces, so at least `min_size` entries.
  static AngularBasis build(const GrushinParams& params, std::size_t min_size = 12,
                            int elements_per_patch = 4, int degree = 10);

  const GrushinParams& params() const { return params_; }
  std::size_t size() const { return entries_.size(); }
  const Entry& entry(std::size_t i) const { return entries_.at(i); }
  double mu(std::size_t i) const { return entries_.at(i).mu; }
  const std::vector<SpectralResult>& sectors() const { return sectors_; }

  double value(std::size_t i, const SpherePoint& s) const;
  /// samples[i][j] = omega_i(node_j). Throws unless the basis is psi-orthonormal on quad to
  /// 1e-6.
  std::vector<std::vector<double>> sample(const SphereQuadrature& quad) const;

 private:
  AngularBasis(GrushinParams params) : params_(params) {}
  GrushinParams params_;
  std::vector<SpectralResult> sectors_;
  std::vector<Entry> entries_;
};

/// u(delta_(eps rho) node) / sqrt(H_eps) at each node of quad.
std::vector<double> rescale(const FieldEvaluator& u, double H_eps, double eps,
                            const SphereQuadrature& quad, double rho = 1.0);

/// phi_i(eps) = sum_j w_psi[j] u(delta_eps node_j) omega_i(node_j).
std::vector<double> fourier_coefficients(const FieldEvaluator& u, double eps,
                                         const AngularBasis& basis, const SphereQuadrature& quad);

struct BlowupReport {
  double ell_input = 0.0;
  double ell = 0.0;        // order of the matched eigenspace
  double matched_mu = 0.0;
  std::vector<std::size_t> eigenspace;  // basis indices with mu == matched_mu
  std::vector<double> epsilons;
  std::vector<double> heights;          // H(eps)
  std::vector<double> normalization;    // sum w_psi u_eps^2 at rho = 1
  /// |eps^-ell u(delta_eps .) - Psi| with Psi = sum beta_i omega_i, beta from the largest eps.
  std::vector<double> sup_error;        // sup over sphere nodes
  std::vector<double> l2_error;         // psi-weighted L2 over the sphere
  /// Distance from eps^-ell u(delta_eps .) to the matched eigenspace at each eps.
  std::vector<double> eigenspace_sup;
  std::vector<double> eigenspace_l2;
  std::vector<double> parseval_sum;     // sum_i phi_i(eps)^2
  std::vector<double> parseval_mass;    // sum w_psi u(delta_eps .)^2
  std::vector<std::vector<double>> projection;  // eps^-ell phi_i(eps) over the eigenspace
  /// beta_i from radius R = eps: eps^-ell phi_i(eps) plus the integrals of Upsilon_i(s) =
  /// int_{B_s} V u omega_i over (0, eps). Equal to projection when V = 0.
  std::vector<std::vector<double>> beta;
  double beta_stability = 0.0;  // relative change of beta between the two largest eps
  bool errors_decreasing = false;  // sup_error strictly decreasing as eps decreases
};

/// Compares eps^-ell u(delta_eps .) with the eigenspace of -L_Theta whose order is nearest
/// to ell. epsilons must be strictly decreasing; V may be null for V = 0.
BlowupReport profile_error(const FieldEvaluator& u, const FieldEvaluator* V, double ell,
                           const AngularBasis& basis, const std::vector<double>& epsilons,
                           const SphereQuadrature& quad, int radial_resolution = 32);

struct VanishingOrder {
  std::vector<double> radii;
  std::vector<double> psi_integral;  // int_{B_r} psi u^2
  std::vector<double> x_integral;    // int_{B_r} |x|^(2 alpha) u^2
  double psi_slope = 0.0;            // least-squares slope of log psi_integral vs log r
  double x_slope = 0.0;
};

VanishingOrder vanishing_order(const FieldEvaluator& u, const std::vector<double>& radii,
                               const SphereQuadrature& quad, int radial_resolution = 24);

}  // namespace grushin

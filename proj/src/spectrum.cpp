#include "grushin/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "grushin/errors.hpp"
#include "grushin/quadrature.hpp"

namespace grushin {

namespace detail {

// Continuous piecewise-polynomial space on a chain of angular patches.
struct FemSpace {
  GrushinParams params;
  std::vector<AngularPatch> patches{};
  bool periodic = false;
  bool pin_start = false, pin_end = false;
  int elements = 0;
  int degree = 0;
  std::vector<double> ref_nodes{};  // Gauss-Lobatto on [-1, 1]
  std::vector<double> bary{};     // barycentric weights of ref_nodes
  Eigen::MatrixXd diff{};         // diff(i, j) = l_j'(ref_nodes[i])
  std::vector<long> free_index{}; // global node -> free dof, -1 when pinned
  long free_count = 0;

  int global_count() const {
    const int n = static_cast<int>(patches.size()) * elements * degree;
    return periodic ? n : n + 1;
  }
  int node(int patch, int e, int j) const {
    const int g = (patch * elements + e) * degree + j;
    return periodic ? g % global_count() : g;
  }
  double element_lo(int patch, int e) const {
    const auto& p = patches[patch];
    return p.z0 + (p.z1 - p.z0) * e / elements;
  }
  double element_len(int patch) const { return (patches[patch].z1 - patches[patch].z0) / elements; }

  // Lagrange basis values at xi.
  std::vector<double> basis(double xi) const {
    const int n = degree + 1;
    std::vector<double> v(n, 1.0);
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m)
        if (m != j) v[j] *= (xi - ref_nodes[m]) / (ref_nodes[j] - ref_nodes[m]);
    return v;
  }
  std::vector<double> basis_derivative(const std::vector<double>& values) const {
    const int n = degree + 1;
    std::vector<double> d(n, 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) d[j] += values[i] * diff(i, j);
    return d;
  }
};

}  // namespace detail

namespace {

using detail::AngularPatch;
using detail::FemSpace;
using detail::PatchKind;
using detail::PatchPoint;

constexpr double pi = std::numbers::pi;

struct Coefficients {
  double A, B, C;  // stiffness, mass and potential densities in the patch variable
};

Coefficients densities(const SLProblem& prob, PatchKind kind, const PatchPoint& pp) {
  const GrushinParams& pr = prob.sector.params;
  const int h = pr.h(), k = pr.k();
  const double a1 = pr.alpha() + 1.0;
  const double L = prob.sector.l * (prob.sector.l + h - 2.0);
  const double M = prob.sector.m * (prob.sector.m + k - 2.0);
  if (kind == PatchKind::angle) {
    const double pv = prob.p(pp.phi);
    return {pv, pv, prob.q(pp.phi)};
  }
  // Closed forms in s avoid 0 * infinity at the pole.
  const double s = std::abs(pp.s), c = std::abs(pp.c);
  const double A = std::pow(s, h - 1) * std::pow(c, k) / a1;
  const double B = a1 * std::pow(s, h - 1 + 2 * pr.alpha()) * std::pow(c, k - 2);
  double C = 0.0;
  if (L > 0.0) C += L * std::pow(s, h - 3) * std::pow(c, k - 2) / a1;
  if (M > 0.0) C += M * a1 * std::pow(s, h - 1 + 2 * pr.alpha()) * std::pow(c, k - 4);
  return {A, B, C};
}

std::shared_ptr<FemSpace> make_space(const SLProblem& prob, int elements) {
  auto sp = std::make_shared<FemSpace>(FemSpace{.params = prob.sector.params});
  sp->patches = prob.patches;
  sp->periodic = prob.periodic;
  sp->pin_start = prob.pin_start;
  sp->pin_end = prob.pin_end;
  sp->elements = elements;
  sp->degree = prob.degree;
  const int n = prob.degree + 1;
  sp->ref_nodes = gauss_lobatto_points(n);
  sp->bary.assign(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < n; ++m)
      if (m != j) sp->bary[j] /= (sp->ref_nodes[j] - sp->ref_nodes[m]);
  sp->diff = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (i != j)
        sp->diff(i, j) = (sp->bary[j] / sp->bary[i]) / (sp->ref_nodes[i] - sp->ref_nodes[j]);
    for (int j = 0; j < n; ++j)
      if (i != j) sp->diff(i, i) -= sp->diff(i, j);
  }
  const int total = sp->global_count();
  sp->free_index.assign(total, 0);
  if (!sp->periodic) {
    if (sp->pin_start) sp->free_index.front() = -1;
    if (sp->pin_end) sp->free_index.back() = -1;
  }
  long next = 0;
  for (auto& f : sp->free_index) f = (f < 0) ? -1 : next++;
  sp->free_count = next;
  return sp;
}

// Element-wise assembly of the stiffness (b form) and mass matrices over free dofs.
void assemble(const SLProblem& prob, const FemSpace& sp, int quad_points, Eigen::MatrixXd* K,
              Eigen::MatrixXd* Mm) {
  const long nf = sp.free_count;
  *K = Eigen::MatrixXd::Zero(nf, nf);
  *Mm = Eigen::MatrixXd::Zero(nf, nf);
  const Rule1D rule = gauss_legendre(quad_points);
  std::vector<std::vector<double>> vals, ders;
  for (double xi : rule.nodes) {
    vals.push_back(sp.basis(xi));
    ders.push_back(sp.basis_derivative(vals.back()));
  }
  const int n = sp.degree + 1;
  for (int pi_ = 0; pi_ < static_cast<int>(sp.patches.size()); ++pi_) {
    const auto& patch = sp.patches[pi_];
    const double len = sp.element_len(pi_), half = 0.5 * len;
    for (int e = 0; e < sp.elements; ++e) {
      const double z0 = sp.element_lo(pi_, e);
      Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(n, n), me = Eigen::MatrixXd::Zero(n, n);
      for (std::size_t qi = 0; qi < rule.nodes.size(); ++qi) {
        const double z = z0 + half * (rule.nodes[qi] + 1.0);
        const PatchPoint pp = detail::evaluate_patch(prob.sector.params, patch, z);
        const Coefficients cf = densities(prob, patch.kind, pp);
        const double w = rule.weights[qi] * half;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double dd = ders[qi][i] * ders[qi][j] / (half * half);
            const double vv = vals[qi][i] * vals[qi][j];
            ke(i, j) += w * (cf.A * dd + cf.C * vv);
            me(i, j) += w * cf.B * vv;
          }
      }
      for (int i = 0; i < n; ++i) {
        const long gi = sp.free_index[sp.node(pi_, e, i)];
        if (gi < 0) continue;
        for (int j = 0; j < n; ++j) {
          const long gj = sp.free_index[sp.node(pi_, e, j)];
          if (gj < 0) continue;
          (*K)(gi, gj) += ke(i, j);
          (*Mm)(gi, gj) += me(i, j);
        }
      }
    }
  }
}

struct RawSolve {
  std::shared_ptr<FemSpace> space;
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // M-orthonormal columns over free dofs
};

RawSolve solve_once(const SLProblem& prob, int elements, int n_eigs) {
  RawSolve out;
  out.space = make_space(prob, elements);
  require(n_eigs <= out.space->free_count / 4,
          "sl_solve: n_eigs must not exceed a quarter of the discretization size");
  Eigen::MatrixXd K, M;
  assemble(prob, *out.space, 3 * prob.degree + 2, &K, &M);
  // M is nearly singular at a pole (density ~ |s|^(2 alpha)), so the pencil is solved as
  // M x = nu (K + M) x, whose Cholesky factor is well conditioned; mu = 1/nu - 1.
  const Eigen::MatrixXd shifted = K + M;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(M, shifted);
  if (es.info() != Eigen::Success) fail(ErrorKind::convergence, "generalized eigensolver failed");
  const long n = es.eigenvalues().size();
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (long i = 0; i < n; ++i) {
    Eigen::VectorXd v = es.eigenvectors().col(n - 1 - i);
    const double mass = v.dot(M * v);
    v /= std::sqrt(mass);
    out.values(i) = v.dot(K * v);
    out.vectors.col(i) = v;
  }
  return out;
}

// Global nodal vector (pinned nodes zero) from free-dof coefficients.
Eigen::VectorXd expand(const FemSpace& sp, const Eigen::VectorXd& free) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(sp.global_count());
  for (int i = 0; i < sp.global_count(); ++i)
    if (sp.free_index[i] >= 0) g(i) = free(sp.free_index[i]);
  return g;
}

double evaluate(const FemSpace& sp, const Eigen::VectorXd& coef, int patch, double z) {
  const auto& p = sp.patches[patch];
  const double len = sp.element_len(patch);
  int e = static_cast<int>(std::floor((z - p.z0) / len));
  e = std::clamp(e, 0, sp.elements - 1);
  const double xi = std::clamp(2.0 * (z - sp.element_lo(patch, e)) / len - 1.0, -1.0, 1.0);
  const auto v = sp.basis(xi);
  double s = 0.0;
  for (int j = 0; j <= sp.degree; ++j) s += coef(sp.node(patch, e, j)) * v[j];
  return s;
}

bool half_problem(const SectorSpec& s) { return s.params.h() == 1 && s.parity != Parity::none; }

}  // namespace

void validate_sector(const SectorSpec& s) {
  require(s.l >= 0 && s.m >= 0, "sector degrees must be nonnegative");
  require(s.params.h() >= 2 || s.l == 0, "sector degree l must be 0 when h = 1");
  require(s.params.k() >= 2 || s.m == 0, "sector degree m must be 0 when k = 1");
  require(s.params.h() == 1 || s.parity == Parity::none, "parity applies only when h = 1");
  require(s.params.h() <= 3 && s.params.k() <= 3, "sectors are implemented for h, k <= 3");
}

double SLProblem::p(double phi) const {
  const GrushinParams& pr = sector.params;
  const double a = (pr.h() - 1.0 + pr.alpha()) / (pr.alpha() + 1.0);
  return std::pow(std::abs(std::sin(phi)), a) * std::pow(std::abs(std::cos(phi)), pr.k() - 1.0);
}

double SLProblem::q(double phi) const {
  const GrushinParams& pr = sector.params;
  const double a1 = pr.alpha() + 1.0;
  const double L = sector.l * (sector.l + pr.h() - 2.0);
  const double M = sector.m * (sector.m + pr.k() - 2.0);
  double w = 0.0;
  if (L > 0.0) {
    const double sn = std::sin(phi);
    w += L / (a1 * a1 * sn * sn);
  }
  if (M > 0.0) {
    const double cs = std::cos(phi);
    w += M / (cs * cs);
  }
  return w == 0.0 ? 0.0 : p(phi) * w;
}

double SLProblem::drift(double phi) const {
  const GrushinParams& pr = sector.params;
  const double a = (pr.h() - 1.0 + pr.alpha()) / (pr.alpha() + 1.0);
  return a / std::tan(phi) - (pr.k() - 1.0) * std::tan(phi);
}

SLProblem reduce_to_ode(const SectorSpec& sector, int elements_per_patch, int degree) {
  validate_sector(sector);
  require(elements_per_patch >= 1, "elements_per_patch must be positive");
  require(degree >= 2 && degree <= 24, "element degree must be in [2, 24]");
  SLProblem prob{.sector = sector};
  prob.elements_per_patch = elements_per_patch;
  prob.degree = degree;
  const GrushinParams& pr = sector.params;
  const bool half = half_problem(sector);
  prob.patches = detail::angular_patches(pr, half, &prob.periodic);
  const AngleRange range = phi_range(pr);
  prob.lo = half ? 0.0 : range.lo;
  prob.hi = range.hi;

  const SphereCase sc = sphere_case(pr);
  const bool odd = sector.parity == Parity::odd;
  prob.pin_start = (pr.h() >= 2 && sector.l >= 1) || (half && odd) ||
                   (sc == SphereCase::h_single && !half && sector.m >= 1);
  prob.pin_end = (pr.k() >= 2 && sector.m >= 1) ||
                 (sc == SphereCase::k_single && sector.l >= 1) ||
                 (sc == SphereCase::both_single && half && odd);

  // (p f')' / p = f'' + (p'/p) f' must reproduce the drift a cot - (k-1) tan.
  for (double t : {0.17, 0.41, 0.63, 0.88}) {
    const double phi = prob.lo + t * (prob.hi - prob.lo);
    if (std::abs(std::sin(phi)) < 1e-3 || std::abs(std::cos(phi)) < 1e-3) continue;
    const double eps = 1e-6;
    const double dlogp = (std::log(prob.p(phi + eps)) - std::log(prob.p(phi - eps))) / (2 * eps);
    if (std::abs(dlogp - prob.drift(phi)) > 1e-5 * (1.0 + std::abs(dlogp)))
      fail(ErrorKind::invariant, "reduced operator drift does not match p'/p");
  }
  return prob;
}

SpectralResult sl_solve(const SLProblem& problem, int n_eigs, double tol) {
  require(n_eigs >= 1, "sl_solve needs at least one eigenvalue");
  const int ec = problem.elements_per_patch, ef = 2 * ec;
  const RawSolve coarse = solve_once(problem, ec, n_eigs);
  const RawSolve fine = solve_once(problem, ef, n_eigs);

  SpectralResult out{.sector = problem.sector};
  out.elements_coarse = ec;
  out.elements_fine = ef;
  out.degree = problem.degree;
  out.tolerance = tol;
  out.space = fine.space;
  for (int i = 0; i < n_eigs; ++i) {
    const double mc = coarse.values(i), mf = fine.values(i);
    out.coarse_eigenvalues.push_back(mc);
    out.eigenvalues.push_back(mf);
    out.refinement_delta = std::max(out.refinement_delta, std::abs(mc - mf) / std::max(1.0, std::abs(mf)));
  }
  if (out.refinement_delta > tol) {
    std::string msg = "eigenvalue refinement did not converge (coarse/fine):";
    char buf[96];
    for (int i = 0; i < n_eigs; ++i) {
      std::snprintf(buf, sizeof buf, " %.12g/%.12g", out.coarse_eigenvalues[i], out.eigenvalues[i]);
      msg += buf;
    }
    fail(ErrorKind::convergence, msg);
  }

  const GrushinParams& pr = problem.sector.params;
  // Eigen returns M-orthonormal vectors over the computed range; rescale to the psi norm of
  // the full sphere: (alpha+1)^-k int p f^2 = 1, the half range carrying half the mass.
  const double mass_factor = half_problem(problem.sector) ? 2.0 : 1.0;
  const double scale = std::sqrt(std::pow(pr.alpha() + 1.0, pr.k()) / mass_factor);
  for (int i = 0; i < n_eigs; ++i) {
    Eigen::VectorXd g = expand(*fine.space, fine.vectors.col(i)) * scale;
    Eigen::Index imax = 0;
    for (Eigen::Index j = 1; j < g.size(); ++j)
      if (std::abs(g(j)) > std::abs(g(imax)) * (1.0 + 1e-9)) imax = j;
    if (g(imax) < 0.0) g = -g;
    out.coefficients.push_back(std::move(g));
  }
  return out;
}

double SpectralResult::eigenfunction(std::size_t i, double phi) const {
  require(i < coefficients.size(), "eigenfunction index out of range");
  const GrushinParams& pr = sector.params;
  double sign = 1.0;
  if (half_problem(sector) && phi < 0.0) {
    phi = -phi;
    if (sector.parity == Parity::odd) sign = -1.0;
  }
  double z = 0.0;
  const int patch = detail::locate_patch(pr, space->patches, phi, &z);
  require(patch >= 0, "phi outside the angular domain of this sector");
  return sign * evaluate(*space, coefficients[i], patch, z);
}

double SpectralResult::rayleigh_quotient(std::size_t i) const {
  require(i < coefficients.size(), "eigenfunction index out of range");
  SLProblem prob{.sector = sector};
  prob.degree = degree;
  prob.patches = space->patches;
  const FemSpace& sp = *space;
  const Rule1D rule = gauss_legendre(4 * sp.degree + 3);
  double num = 0.0, den = 0.0;
  for (int pi_ = 0; pi_ < static_cast<int>(sp.patches.size()); ++pi_) {
    const double half = 0.5 * sp.element_len(pi_);
    for (int e = 0; e < sp.elements; ++e) {
      const double z0 = sp.element_lo(pi_, e);
      for (std::size_t qi = 0; qi < rule.nodes.size(); ++qi) {
        const auto v = sp.basis(rule.nodes[qi]);
        const auto d = sp.basis_derivative(v);
        double f = 0.0, df = 0.0;
        for (int j = 0; j <= sp.degree; ++j) {
          const double c = coefficients[i](sp.node(pi_, e, j));
          f += c * v[j];
          df += c * d[j] / half;
        }
        const double z = z0 + half * (rule.nodes[qi] + 1.0);
        const PatchPoint pp = detail::evaluate_patch(sector.params, sp.patches[pi_], z);
        const Coefficients cf = densities(prob, sp.patches[pi_].kind, pp);
        const double w = rule.weights[qi] * half;
        num += w * (cf.A * df * df + cf.C * f * f);
        den += w * cf.B * f * f;
      }
    }
  }
  return num / den;
}

double mu_from_degree(const GrushinParams& params, int n) {
  require(n >= 0, "degree must be nonnegative");
  const double a1 = params.alpha() + 1.0;
  return n * (n + params.Q() - 2.0) / (a1 * a1);
}

double ell_from_mu(const GrushinParams& params, double mu) {
  require(mu >= 0.0, "mu must be nonnegative");
  const double q2 = params.Q() - 2.0, a1 = params.alpha() + 1.0;
  const double disc = q2 * q2 + 4.0 * mu * a1 * a1;
  // Rationalized form of (-(Q-2) + sqrt(disc)) / 2, free of cancellation.
  const double root = std::sqrt(disc);
  if (q2 <= 0.0) return 0.5 * (root - q2);
  return 2.0 * mu * a1 * a1 / (q2 + root);
}

std::vector<FormulaMatch> classify_against_formula(const GrushinParams& params,
                                                   const std::vector<double>& mu) {
  std::vector<FormulaMatch> out;
  for (double m : mu) {
    const double ell = ell_from_mu(params, std::max(0.0, m));
    const int guess = static_cast<int>(std::llround(ell));
    FormulaMatch best{0, std::numeric_limits<double>::infinity()};
    for (int n = std::max(0, guess - 1); n <= guess + 1; ++n) {
      const double gap = std::abs(m - mu_from_degree(params, n));
      if (gap < best.gap) best = {n, gap};
    }
    out.push_back(best);
  }
  return out;
}

std::vector<FormulaMatch> classify_against_formula(const SpectralResult& result) {
  return classify_against_formula(result.sector.params, result.eigenvalues);
}

int harmonic_count(int dim, int degree) {
  require(dim >= 1 && dim <= 3, "sub-sphere harmonics are implemented for dimension <= 3");
  require(degree >= 0, "harmonic degree must be nonnegative");
  if (dim == 1) return degree == 0 ? 1 : 0;
  if (dim == 2) return degree == 0 ? 1 : 2;
  return 2 * degree + 1;
}

double sphere_harmonic(int dim, int degree, int index, const std::vector<double>& angles) {
  require(index >= 0 && index < harmonic_count(dim, degree), "harmonic index out of range");
  require(static_cast<int>(angles.size()) == dim - 1, "wrong number of sub-sphere angles");
  if (dim == 1) return 1.0;
  if (dim == 2) {
    const double t = angles[0];
    if (degree == 0) return 1.0 / std::sqrt(2.0 * pi);
    return (index == 0 ? std::cos(degree * t) : std::sin(degree * t)) / std::sqrt(pi);
  }
  // index 0 -> order 0, then cos/sin pairs for orders 1..degree.
  const int order = (index + 1) / 2;
  const double polar = std::sph_legendre(degree, order, angles[0]);
  if (order == 0) return polar;
  const double az = angles[1];
  return std::sqrt(2.0) * polar * (index % 2 == 1 ? std::cos(order * az) : std::sin(order * az));
}

}  // namespace grushin

#include "grushin/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <tuple>

#include "grushin/errors.hpp"
#include "grushin/integrals.hpp"
#include "grushin/parallel.hpp"
#include "grushin/quadrature.hpp"

namespace grushin {

namespace {

struct SectorKey {
  int l, m;
  Parity parity;
};

double slope_fit(const std::vector<double>& r, const std::vector<double>& v) {
  const double n = static_cast<double>(r.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) fail(ErrorKind::invariant, "degenerate log-log fit");
    const double x = std::log(r[i]), y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) fail(ErrorKind::invariant, "degenerate log-log fit");
  return (n * sxy - sx * sy) / denom;
}

void require_inside(const FieldEvaluator& u, const SphereQuadrature& quad, double lambda) {
  require(u.params() == quad.params, "field and sphere quadrature use different (h, k, alpha)");
  for (const Point& p : quad.points) {
    if (!u.covers(dilate(quad.params, lambda, p))) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "rescaled sphere at scale %.17g exits the grid domain", lambda);
      fail(ErrorKind::invalid_argument, buf);
    }
  }
}

std::vector<double> sample_dilated(const FieldEvaluator& u, const SphereQuadrature& quad,
                                   double lambda) {
  std::vector<double> g(quad.size());
  for (std::size_t j = 0; j < quad.size(); ++j) g[j] = u.value(dilate(quad.params, lambda, quad.points[j]));
  return g;
}

// Correction to R^-ell phi_i(R) from the potential term, for each eigenspace member:
//   c1 int_0^R s^(1-Q-ell) Ups(s) ds - ell R^(2-Q-2ell) / (2-Q-2ell) int_0^R s^(ell-1) Ups(s) ds
// with Ups(s) = int_0^s t^(Q-1) zeta(t) dt. Swapping the order of integration leaves one
// integral in t over (0, R).
std::vector<double> potential_correction(const FieldEvaluator& u, const FieldEvaluator& V,
                                         double R, double ell,
                                         const std::vector<std::vector<double>>& omega,
                                         const SphereQuadrature& quad, int n) {
  const double Q = quad.params.Q();
  const bool zero_ell = std::abs(ell) < 1e-12;
  const double c1 = zero_ell ? 1.0 : (2.0 - Q - ell) / (2.0 - Q - 2.0 * ell);
  const Rule1D rule = gauss_legendre(n, 0.0, R);
  std::vector<double> out(omega.size(), 0.0);
  for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
    const double t = rule.nodes[a];
    const double inner = std::abs(Q + ell - 2.0) < 1e-12
                             ? std::log(R / t)
                             : (std::pow(t, 2.0 - Q - ell) - std::pow(R, 2.0 - Q - ell)) / (Q + ell - 2.0);
    double kernel = c1 * inner;
    if (!zero_ell)
      kernel -= std::pow(R, 2.0 - Q - 2.0 * ell) * (std::pow(R, ell) - std::pow(t, ell)) /
                (2.0 - Q - 2.0 * ell);
    kernel *= std::pow(t, Q - 1.0) * rule.weights[a];
    for (std::size_t j = 0; j < quad.size(); ++j) {
      const Point p = dilate(quad.params, t, quad.points[j]);
      const double vu = quad.weights_plain[j] * V.value(p) * u.value(p) * kernel;
      for (std::size_t i = 0; i < omega.size(); ++i) out[i] += vu * omega[i][j];
    }
  }
  return out;
}

}  // namespace

AngularBasis AngularBasis::build(const GrushinParams& params, std::size_t min_size,
                                 int elements_per_patch, int degree) {
  require(min_size >= 1, "basis size must be positive");
  const int h = params.h(), k = params.k();
  const double a1 = params.alpha() + 1.0;
  for (double target = 1.0; target < 1e4; target *= 2.0) {
    AngularBasis basis(params);
    std::vector<Entry> found;
    const std::vector<Parity> parities =
        h == 1 ? std::vector<Parity>{Parity::even, Parity::odd} : std::vector<Parity>{Parity::none};
    std::vector<SectorKey> keys;
    for (int l = 0; l == 0 || (h >= 2 && l * (l + h - 2.0) / (a1 * a1) <= target); ++l)
      for (int m = 0; m == 0 || (k >= 2 && m * (m + k - 2.0) <= target); ++m)
        for (Parity par : parities) keys.push_back({l, m, par});

    std::vector<SectorKey> solved;
    for (const auto& key : keys) {
      const SLProblem prob = reduce_to_ode(SectorSpec{params, key.l, key.m, key.parity},
                                           elements_per_patch, degree);
      const int dofs = static_cast<int>(prob.patches.size()) * elements_per_patch * degree - 1;
      // Request only as many eigenvalues as needed to pass the target.
      std::optional<SpectralResult> res;
      for (int n_eigs = 4;; n_eigs *= 2) {
        if (n_eigs > dofs / 4)
          fail(ErrorKind::convergence, "angular basis: discretization too small for the requested size");
        res = sl_solve(prob, n_eigs);
        if (res->eigenvalues.back() > target) break;
      }
      const std::size_t sector = basis.sectors_.size();
      for (std::size_t i = 0; i < res->eigenvalues.size(); ++i) {
        if (res->eigenvalues[i] > target) break;
        for (int a = 0; a < harmonic_count(h, key.l); ++a)
          for (int b = 0; b < harmonic_count(k, key.m); ++b)
            found.push_back({std::max(0.0, res->eigenvalues[i]), sector, i, a, b});
      }
      basis.sectors_.push_back(std::move(*res));
    }
    if (found.size() < min_size) continue;
    auto key_of = [](const Entry& e) {
      return std::make_tuple(std::llround(e.mu * 1e8), e.sector, e.eig, e.theta_harmonic,
                             e.eta_harmonic);
    };
    std::sort(found.begin(), found.end(),
              [&](const Entry& x, const Entry& y) { return key_of(x) < key_of(y); });
    const double cut = found[min_size - 1].mu;
    for (const auto& e : found)
      if (e.mu <= cut + 1e-8 * std::max(1.0, cut)) basis.entries_.push_back(e);
    return basis;
  }
  fail(ErrorKind::convergence, "angular basis: eigenvalue search did not terminate");
}

double AngularBasis::value(std::size_t i, const SpherePoint& s) const {
  const Entry& e = entries_.at(i);
  const SpectralResult& sec = sectors_[e.sector];
  return sec.eigenfunction(e.eig, s.phi) *
         sphere_harmonic(params_.h(), sec.sector.l, e.theta_harmonic, s.theta) *
         sphere_harmonic(params_.k(), sec.sector.m, e.eta_harmonic, s.eta);
}

std::vector<std::vector<double>> AngularBasis::sample(const SphereQuadrature& quad) const {
  require(quad.params == params_, "basis and sphere quadrature use different (h, k, alpha)");
  std::vector<std::vector<double>> out(size(), std::vector<double>(quad.size()));
  parallel_for(size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < quad.size(); ++j) out[i][j] = value(i, quad.nodes[j]);
  });
  double worst = 0.0;
  for (std::size_t a = 0; a < size(); ++a)
    for (std::size_t b = a; b < size(); ++b) {
      double g = 0.0;
      for (std::size_t j = 0; j < quad.size(); ++j) g += quad.weights_psi[j] * out[a][j] * out[b][j];
      worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  if (worst > 1e-6) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "angular basis is not psi-orthonormal on this quadrature (error %.3g)", worst);
    fail(ErrorKind::invariant, buf);
  }
  return out;
}

std::vector<double> rescale(const FieldEvaluator& u, double H_eps, double eps,
                            const SphereQuadrature& quad, double rho) {
  require(H_eps > 0.0, "rescale needs a positive height H(eps)");
  require(eps > 0.0 && rho > 0.0, "rescale needs positive eps and rho");
  require_inside(u, quad, eps * rho);
  auto g = sample_dilated(u, quad, eps * rho);
  const double inv = 1.0 / std::sqrt(H_eps);
  for (double& v : g) v *= inv;
  return g;
}

std::vector<double> fourier_coefficients(const FieldEvaluator& u, double eps,
                                         const AngularBasis& basis, const SphereQuadrature& quad) {
  require(eps > 0.0, "eps must be positive");
  const auto samples = basis.sample(quad);
  require_inside(u, quad, eps);
  const auto g = sample_dilated(u, quad, eps);
  std::vector<double> phi(basis.size(), 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < quad.size(); ++j) phi[i] += quad.weights_psi[j] * g[j] * samples[i][j];
  return phi;
}

BlowupReport profile_error(const FieldEvaluator& u, const FieldEvaluator* V, double ell,
                           const AngularBasis& basis, const std::vector<double>& epsilons,
                           const SphereQuadrature& quad, int radial_resolution) {
  require(!epsilons.empty(), "profile_error needs at least one eps");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    require(epsilons[i] > 0.0, "epsilons must be positive");
    require(i == 0 || epsilons[i] < epsilons[i - 1], "epsilons must be strictly decreasing");
  }
  require(ell >= 0.0, "ell must be nonnegative");
  const GrushinParams& pr = quad.params;
  const auto samples = basis.sample(quad);
  for (double e : epsilons) require_inside(u, quad, e);

  BlowupReport rep;
  rep.ell_input = ell;
  rep.epsilons = epsilons;
  const double a1 = pr.alpha() + 1.0;
  const double mu_in = ell * (ell + pr.Q() - 2.0) / (a1 * a1);
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < basis.size(); ++i)
    if (std::abs(basis.mu(i) - mu_in) < std::abs(basis.mu(nearest) - mu_in)) nearest = i;
  rep.matched_mu = basis.mu(nearest);
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (std::abs(basis.mu(i) - rep.matched_mu) <= 1e-6 * std::max(1.0, rep.matched_mu))
      rep.eigenspace.push_back(i);
  rep.ell = ell_from_mu(pr, rep.matched_mu);

  const std::size_t ne = epsilons.size(), nq = quad.size();
  std::vector<std::vector<double>> scaled(ne);
  rep.heights.assign(ne, 0.0);
  rep.normalization.assign(ne, 0.0);
  rep.parseval_sum.assign(ne, 0.0);
  rep.parseval_mass.assign(ne, 0.0);
  rep.eigenspace_sup.assign(ne, 0.0);
  rep.eigenspace_l2.assign(ne, 0.0);
  rep.projection.assign(ne, {});
  rep.beta.assign(ne, {});
  std::vector<std::vector<double>> omega;
  for (std::size_t i : rep.eigenspace) omega.push_back(samples[i]);
  parallel_for(ne, [&](std::size_t t) {
    const double eps = epsilons[t];
    const auto g = sample_dilated(u, quad, eps);
    double H = 0.0;
    for (std::size_t j = 0; j < nq; ++j) H += quad.weights_psi[j] * g[j] * g[j];
    rep.heights[t] = H;
    if (!(H > 0.0)) return;
    double norm = 0.0;
    for (std::size_t j = 0; j < nq; ++j) {
      const double v = g[j] / std::sqrt(H);
      norm += quad.weights_psi[j] * v * v;
    }
    rep.normalization[t] = norm;
    rep.parseval_mass[t] = H;
    std::vector<double> phi(basis.size(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = 0; j < nq; ++j) phi[i] += quad.weights_psi[j] * g[j] * samples[i][j];
      rep.parseval_sum[t] += phi[i] * phi[i];
    }
    const double scale = std::pow(eps, -rep.ell);
    for (std::size_t i : rep.eigenspace) rep.projection[t].push_back(phi[i] * scale);
    rep.beta[t] = rep.projection[t];
    if (V != nullptr) {
      const auto corr = potential_correction(u, *V, eps, rep.ell, omega, quad, radial_resolution);
      for (std::size_t a = 0; a < corr.size(); ++a) rep.beta[t][a] += corr[a];
    }
    scaled[t].resize(nq);
    double sup = 0.0, l2 = 0.0;
    for (std::size_t j = 0; j < nq; ++j) {
      double psi_val = 0.0;
      for (std::size_t a = 0; a < rep.eigenspace.size(); ++a)
        psi_val += rep.projection[t][a] * samples[rep.eigenspace[a]][j];
      scaled[t][j] = g[j] * scale;
      const double d = scaled[t][j] - psi_val;
      sup = std::max(sup, std::abs(d));
      l2 += quad.weights_psi[j] * d * d;
    }
    rep.eigenspace_sup[t] = sup;
    rep.eigenspace_l2[t] = std::sqrt(l2);
  });
  for (std::size_t t = 0; t < ne; ++t) {
    if (!(rep.heights[t] > 0.0)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "H(eps) <= 0 at eps = %.17g", epsilons[t]);
      fail(ErrorKind::invariant, buf);
    }
  }

  // Psi fixed from the largest eps.
  rep.sup_error.assign(ne, 0.0);
  rep.l2_error.assign(ne, 0.0);
  for (std::size_t t = 0; t < ne; ++t) {
    double sup = 0.0, l2 = 0.0;
    for (std::size_t j = 0; j < nq; ++j) {
      double psi_val = 0.0;
      for (std::size_t a = 0; a < rep.eigenspace.size(); ++a)
        psi_val += rep.beta[0][a] * samples[rep.eigenspace[a]][j];
      const double d = scaled[t][j] - psi_val;
      sup = std::max(sup, std::abs(d));
      l2 += quad.weights_psi[j] * d * d;
    }
    rep.sup_error[t] = sup;
    rep.l2_error[t] = std::sqrt(l2);
  }

  if (ne >= 2) {
    double diff = 0.0, size = 0.0;
    for (std::size_t a = 0; a < rep.eigenspace.size(); ++a) {
      diff = std::max(diff, std::abs(rep.beta[0][a] - rep.beta[1][a]));
      size = std::max(size, std::abs(rep.beta[0][a]));
    }
    rep.beta_stability = size > 0.0 ? diff / size : diff;
  }
  rep.errors_decreasing = true;
  for (std::size_t t = 1; t < ne; ++t)
    if (!(rep.sup_error[t] < rep.sup_error[t - 1])) rep.errors_decreasing = false;
  return rep;
}

VanishingOrder vanishing_order(const FieldEvaluator& u, const std::vector<double>& radii,
                               const SphereQuadrature& quad, int radial_resolution) {
  require(radii.size() >= 6, "vanishing_order needs at least 6 radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require(radii[i] > 0.0, "radii must be positive");
    require(i == 0 || radii[i] > radii[i - 1], "radii must be strictly increasing");
    require_inside(u, quad, radii[i]);
  }
  const GrushinParams& pr = quad.params;
  VanishingOrder out;
  out.radii = radii;
  out.psi_integral.assign(radii.size(), 0.0);
  out.x_integral.assign(radii.size(), 0.0);
  parallel_for(radii.size(), [&](std::size_t i) {
    out.psi_integral[i] = ball_integral(quad, radii[i], radial_resolution, [&](const Point& p) {
      const double v = u.value(p);
      return psi_alpha(pr, p) * v * v;
    });
    out.x_integral[i] = ball_integral(quad, radii[i], radial_resolution, [&](const Point& p) {
      double x2 = 0.0;
      for (double c : p.x) x2 += c * c;
      const double v = u.value(p);
      return std::pow(x2, pr.alpha()) * v * v;
    });
  });
  out.psi_slope = slope_fit(radii, out.psi_integral);
  out.x_slope = slope_fit(radii, out.x_integral);
  return out;
}

}  // namespace grushin

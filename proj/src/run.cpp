#include "grushin/run.hpp"

#include <cmath>
#include <memory>
#include <ostream>

#include "grushin/blowup.hpp"
#include "grushin/field.hpp"
#include "grushin/frequency.hpp"
#include "grushin/grid.hpp"
#include "grushin/identities.hpp"
#include "grushin/parallel.hpp"
#include "grushin/spectrum.hpp"
#include "grushin/writers.hpp"

namespace grushin {

namespace fs = std::filesystem;

namespace {

struct Check {
  std::string name;
  double value;
  double limit;
  bool passed;
  bool hard;  // a failed hard check makes the run exit with exit_invariant
};

class Checks {
 public:
  void add(std::string name, double value, double limit, bool passed, bool hard) {
    list_.push_back({std::move(name), value, limit, passed, hard});
  }
  bool hard_failure() const {
    for (const auto& c : list_)
      if (c.hard && !c.passed) return true;
    return false;
  }
  Json json() const {
    Json out = Json::array();
    for (const auto& c : list_)
      out.push_back({{"name", c.name},
                     {"value", c.value},
                     {"limit", c.limit},
                     {"passed", c.passed},
                     {"severity", c.hard ? "invariant" : "diagnostic"}});
    return out;
  }
  const std::vector<Check>& list() const { return list_; }

 private:
  std::vector<Check> list_;
};

Json doubles(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

struct Solution {
  GridSpec grid;
  ScalarField u;
  std::optional<double> lambda{};
  int iterations = 0;
  std::unique_ptr<GridFunction> field{};
  std::unique_ptr<AnalyticField> V{};  // null when V = 0
  bool v_zero = true;
};

std::unique_ptr<Solution> compute_solution(const RunConfig& cfg, Checks& checks, Json& results) {
  const GridSpec grid = GridSpec::centered(cfg.params, cfg.half_x, cfg.half_y, cfg.nodes);
  auto sol = std::make_unique<Solution>(Solution{grid, ScalarField::zeros(grid)});
  if (cfg.solution == SolutionKind::eigen) {
    const OperatorMatrix A = assemble_operator(grid, nullptr);
    Eigenpair eig = solve_smallest_eigenpair(A);
    sol->u = eig.u;
    sol->lambda = eig.lambda;
    sol->iterations = eig.iterations;
    sol->V = std::make_unique<AnalyticField>(Potential::constant(cfg.params, eig.lambda).as_field());
    sol->v_zero = false;
    const double rq = rayleigh_quotient(A, sol->u);
    const double gap = std::abs(rq - eig.lambda) / std::abs(eig.lambda);
    checks.add("eigen_rayleigh_consistency", gap, 1e-8, gap <= 1e-8, true);
  } else {
    const Potential V = cfg.potential();
    const ScalarField vs = V.sample(grid);
    const OperatorMatrix A = assemble_operator(grid, &vs);
    const ScalarField boundary = ScalarField::sample(grid, [&](const Point& p) {
      return cfg.boundary().value(p);
    });
    sol->u = solve_dirichlet(A, ScalarField::zeros(grid), boundary);
    if (V.kind() != Potential::Kind::zero) {
      sol->V = std::make_unique<AnalyticField>(V.as_field());
      sol->v_zero = false;
    }
  }
  bool finite = true;
  double umin = sol->u[0], umax = sol->u[0];
  for (double v : sol->u.values()) {
    finite = finite && std::isfinite(v);
    umin = std::min(umin, v);
    umax = std::max(umax, v);
  }
  checks.add("solution_finite", finite ? 0.0 : 1.0, 0.0, finite, true);
  sol->field = std::make_unique<GridFunction>(sol->u);

  Json r;
  r["kind"] = cfg.solution == SolutionKind::eigen ? "eigen" : "dirichlet";
  r["boundary"] = cfg.boundary_text;
  r["potential"] = cfg.potential_text;
  if (sol->lambda) {
    r["lambda"] = *sol->lambda;
    r["iterations"] = sol->iterations;
  }
  r["u_min"] = umin;
  r["u_max"] = umax;
  results["solution"] = r;
  return sol;
}

Json grid_json(const RunConfig& cfg) {
  return Json{{"half_x", cfg.half_x}, {"half_y", cfg.half_y}, {"nodes", cfg.nodes}};
}

Json quadrature_json(const RunConfig& cfg, const SphereQuadrature& quad) {
  return Json{{"resolution", cfg.quadrature_resolution},
              {"sub_resolution", cfg.sub_resolution},
              {"nodes", quad.size()},
              {"radial", cfg.radial_resolution}};
}

struct FrequencyOut {
  RadialProfile profile;
  std::vector<double> dh;
  std::optional<EllEstimate> ell;
};

FrequencyOut frequency_section(const RunConfig& cfg, const Solution& sol,
                               const SphereQuadrature& quad, Checks& checks, Json& results) {
  FrequencyOut out{almgren_profile(*sol.field, sol.V.get(), cfg.radii, quad, cfg.radial_resolution),
                   {}, std::nullopt};
  const auto& p = out.profile;
  if (p.radii.size() >= 5) out.dh = dh_identity_residual(p);
  if (p.radii.size() >= 8 && p.radii.back() >= 4.0 * p.radii.front()) out.ell = extract_ell(p);

  double hmin = p.H.empty() ? 0.0 : p.H[0], nmin = p.N.empty() ? 0.0 : p.N[0];
  for (double v : p.H) hmin = std::min(hmin, v);
  for (double v : p.N) nmin = std::min(nmin, v);
  if (!p.radii.empty()) {
    checks.add("H_positive", hmin, 0.0, hmin > 0.0, true);
    checks.add("N_above_minus_one", nmin, -1.0, nmin > -1.0, true);
  }
  if (!out.dh.empty()) {
    double worst = 0.0;
    for (double v : out.dh) worst = std::max(worst, v);
    checks.add("dh_identity_residual", worst, 1e-2, worst <= 1e-2, false);
  }
  if (out.ell) {
    const double gap = std::abs(out.ell->ell_N - out.ell->ell_H);
    checks.add("ell_estimators_agree", gap, 3e-2, gap <= 3e-2, false);
  }
  if (sol.v_zero && p.N.size() >= 2) {
    double drop = 0.0;
    for (std::size_t i = 1; i < p.N.size(); ++i) drop = std::max(drop, p.N[i - 1] - p.N[i]);
    checks.add("N_nondecreasing", drop, 1e-3, drop <= 1e-3, false);
  }

  Json r;
  r["radii"] = doubles(p.radii);
  r["H"] = doubles(p.H);
  r["D"] = doubles(p.D);
  r["N"] = doubles(p.N);
  r["dh_residual"] = doubles(out.dh);
  if (out.ell) r["ell"] = Json{{"ell_N", out.ell->ell_N}, {"ell_H", out.ell->ell_H}};
  r["warnings"] = p.warnings;
  results["frequency"] = r;
  return out;
}

void spectrum_section(const RunConfig& cfg, const SphereQuadrature& quad, Checks& checks,
                      Json& results, Json& convergence) {
  std::vector<SectorSpec> sectors;
  for (int l : cfg.sector_l)
    for (int m : cfg.sector_m)
      for (Parity par : cfg.effective_parities()) sectors.push_back({cfg.params, l, m, par});
  std::vector<std::optional<SpectralResult>> solved(sectors.size());
  parallel_for(sectors.size(), [&](std::size_t i) {
    const SLProblem prob = reduce_to_ode(sectors[i], cfg.elements, cfg.degree);
    solved[i] = sl_solve(prob, cfg.eigenvalues, cfg.spectrum_tolerance);
  });

  const bool authoritative = cfg.params.h() >= 2;
  Json list = Json::array(), conv = Json::array();
  double min_mu = 0.0, worst_rq = 0.0, worst_orth = 0.0, worst_gap = 0.0;
  bool first = true;
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    const SpectralResult& res = *solved[s];
    const auto& sec = sectors[s];
    Json js;
    js["l"] = sec.l;
    js["m"] = sec.m;
    js["parity"] = sec.parity == Parity::none ? "none" : sec.parity == Parity::even ? "even" : "odd";
    js["eigenvalues"] = doubles(res.eigenvalues);
    std::vector<double> ells, rq;
    for (std::size_t i = 0; i < res.size(); ++i) {
      ells.push_back(ell_from_mu(cfg.params, std::max(0.0, res.eigenvalues[i])));
      const double q = res.rayleigh_quotient(i);
      rq.push_back(q);
      worst_rq = std::max(worst_rq, std::abs(q - res.eigenvalues[i]));
      min_mu = first ? res.eigenvalues[i] : std::min(min_mu, res.eigenvalues[i]);
      first = false;
    }
    js["ell"] = doubles(ells);
    js["rayleigh_quotients"] = doubles(rq);
    const auto matches = classify_against_formula(res);
    Json jm = Json::array();
    for (const auto& m : matches) {
      jm.push_back({{"n", m.n}, {"gap", m.gap}});
      worst_gap = std::max(worst_gap, m.gap);
    }
    js["formula_matches"] = jm;

    // psi-orthonormality of f_i(phi) Y(theta) Z(eta) on the sphere rule.
    std::vector<std::vector<double>> w(res.size(), std::vector<double>(quad.size()));
    for (std::size_t i = 0; i < res.size(); ++i)
      for (std::size_t j = 0; j < quad.size(); ++j) {
        const auto& node = quad.nodes[j];
        w[i][j] = res.eigenfunction(i, node.phi) *
                  sphere_harmonic(cfg.params.h(), sec.l, 0, node.theta) *
                  sphere_harmonic(cfg.params.k(), sec.m, 0, node.eta);
      }
    double orth = 0.0;
    for (std::size_t a = 0; a < res.size(); ++a)
      for (std::size_t b = a; b < res.size(); ++b) {
        double g = 0.0;
        for (std::size_t j = 0; j < quad.size(); ++j) g += quad.weights_psi[j] * w[a][j] * w[b][j];
        orth = std::max(orth, std::abs(g - (a == b ? 1.0 : 0.0)));
      }
    worst_orth = std::max(worst_orth, orth);
    js["orthonormality_error"] = orth;
    list.push_back(js);
    conv.push_back({{"l", sec.l},
                    {"m", sec.m},
                    {"parity", js["parity"]},
                    {"elements", Json::array({res.elements_coarse, res.elements_fine})},
                    {"degree", res.degree},
                    {"coarse_eigenvalues", doubles(res.coarse_eigenvalues)},
                    {"refinement_delta", res.refinement_delta}});
  }
  checks.add("mu_nonnegative", min_mu, -1e-10, min_mu >= -1e-10, true);
  checks.add("rayleigh_consistency", worst_rq, 1e-8, worst_rq <= 1e-8, true);
  checks.add("psi_orthonormality", worst_orth, 1e-6, worst_orth <= 1e-6, true);
  if (authoritative) checks.add("formula_gap", worst_gap, 1e-3, worst_gap <= 1e-3, false);
  results["spectrum"] = Json{{"authoritative", authoritative}, {"sectors", list}};
  convergence["spectrum"] = conv;
}

void blowup_section(const RunConfig& cfg, const Solution& sol, const SphereQuadrature& quad,
                    const FrequencyOut* freq, Checks& checks, Json& results) {
  double ell = 0.0;
  std::string source = "config";
  if (cfg.ell) {
    ell = *cfg.ell;
  } else {
    std::optional<EllEstimate> est = freq ? freq->ell : std::nullopt;
    if (!est) {
      const RadialProfile p =
          almgren_profile(*sol.field, sol.V.get(), cfg.radii, quad, cfg.radial_resolution);
      est = extract_ell(p);
    }
    ell = std::max(0.0, est->ell_N);
    source = "frequency";
  }
  const AngularBasis basis = AngularBasis::build(cfg.params, cfg.basis_size);
  const BlowupReport rep =
      profile_error(*sol.field, sol.V.get(), ell, basis, cfg.epsilons, quad, cfg.radial_resolution);

  double norm_dev = 0.0, parseval_excess = 0.0;
  for (std::size_t t = 0; t < rep.epsilons.size(); ++t) {
    norm_dev = std::max(norm_dev, std::abs(rep.normalization[t] - 1.0));
    parseval_excess = std::max(parseval_excess, rep.parseval_sum[t] / rep.parseval_mass[t] - 1.0);
  }
  checks.add("normalization", norm_dev, 5e-3, norm_dev <= 5e-3, true);
  checks.add("parseval", parseval_excess, 1e-6, parseval_excess <= 1e-6, false);
  checks.add("profile_error_decreasing", rep.errors_decreasing ? 1.0 : 0.0, 1.0, rep.errors_decreasing,
             false);
  if (rep.epsilons.size() >= 2)
    checks.add("beta_stability", rep.beta_stability, 5e-2, rep.beta_stability <= 5e-2, false);

  Json r;
  r["ell_source"] = source;
  r["ell_input"] = rep.ell_input;
  r["ell"] = rep.ell;
  r["matched_mu"] = rep.matched_mu;
  r["basis_mu"] = [&] {
    std::vector<double> mu;
    for (std::size_t i = 0; i < basis.size(); ++i) mu.push_back(basis.mu(i));
    return doubles(mu);
  }();
  r["eigenspace"] = rep.eigenspace;
  r["epsilons"] = doubles(rep.epsilons);
  r["H"] = doubles(rep.heights);
  r["normalization"] = doubles(rep.normalization);
  r["sup_error"] = doubles(rep.sup_error);
  r["l2_error"] = doubles(rep.l2_error);
  r["eigenspace_sup_error"] = doubles(rep.eigenspace_sup);
  r["eigenspace_l2_error"] = doubles(rep.eigenspace_l2);
  r["parseval_sum"] = doubles(rep.parseval_sum);
  r["parseval_mass"] = doubles(rep.parseval_mass);
  Json beta = Json::array();
  for (const auto& b : rep.beta) beta.push_back(doubles(b));
  r["beta"] = beta;
  Json projection = Json::array();
  for (const auto& b : rep.projection) projection.push_back(doubles(b));
  r["projection"] = projection;
  r["beta_stability"] = rep.beta_stability;

  const auto& vr = cfg.vanishing_radii.empty() ? cfg.radii : cfg.vanishing_radii;
  if (vr.size() >= 6) {
    const VanishingOrder vo = vanishing_order(*sol.field, vr, quad, cfg.radial_resolution);
    r["vanishing_order"] = Json{{"radii", doubles(vo.radii)},
                                {"psi_integral", doubles(vo.psi_integral)},
                                {"x_weight_integral", doubles(vo.x_integral)},
                                {"psi_slope", vo.psi_slope},
                                {"x_weight_slope", vo.x_slope}};
  }
  results["blowup"] = r;
}

void pohozaev_section(const RunConfig& cfg, const Solution& sol, const SphereQuadrature& quad,
                      Checks& checks, Json& results, Json& convergence) {
  const AnalyticField v = cfg.test_function().as_field();
  Json per = Json::array();
  double worst_p = 0.0, worst_i = 0.0;
  for (double r : cfg.pohozaev_radii) {
    const PohozaevTerms p = pohozaev_residual(*sol.field, sol.V.get(), r, quad, cfg.radial_resolution);
    const IntByPartsTerms ib = int_by_parts_residual(*sol.field, v, r, quad, cfg.radial_resolution);
    worst_p = std::max(worst_p, p.residual);
    worst_i = std::max(worst_i, ib.residual);
    per.push_back({{"r", r},
                   {"pohozaev", {{"grad_ball", p.grad_ball},
                                 {"grad_sphere", p.grad_sphere},
                                 {"xg_sphere", p.xg_sphere},
                                 {"v_sphere", p.v_sphere},
                                 {"v_ball", p.v_ball},
                                 {"dv_ball", p.dv_ball},
                                 {"lhs", p.lhs},
                                 {"rhs", p.rhs},
                                 {"residual", p.residual}}},
                   {"integration_by_parts", {{"laplacian_term", ib.laplacian_term},
                                             {"boundary_term", ib.boundary_term},
                                             {"gradient_term", ib.gradient_term},
                                             {"residual", ib.residual}}}});
  }
  checks.add("pohozaev_residual", worst_p, 1e-3, worst_p <= 1e-3, false);
  checks.add("int_by_parts_residual", worst_i, 1e-3, worst_i <= 1e-3, false);

  const ScalingReport sc = scaling_checks(quad);
  checks.add("volume_law", sc.volume_law_error, 1e-6, sc.volume_law_error <= 1e-6, false);
  checks.add("surface_law", sc.surface_law_error, 1e-6, sc.surface_law_error <= 1e-6, false);
  checks.add("coarea_order", sc.coarea_order, 1.5, sc.coarea_order >= 1.5, false);
  convergence["measured_orders"] = Json{{"coarea", sc.coarea_order}};
  results["pohozaev"] = Json{
      {"test_function", cfg.test_function_text},
      {"radii", per},
      {"scaling", {{"radii", doubles(sc.radii)},
                   {"volume_cartesian", doubles(sc.volume_cartesian)},
                   {"volume_polar", doubles(sc.volume_polar)},
                   {"surface_cartesian", doubles(sc.surface_cartesian)},
                   {"surface_polar", doubles(sc.surface_polar)},
                   {"volume_law_error", sc.volume_law_error},
                   {"surface_law_error", sc.surface_law_error},
                   {"volume_route_gap", sc.volume_route_gap},
                   {"surface_route_gap", sc.surface_route_gap},
                   {"coarea_steps", doubles(sc.coarea_steps)},
                   {"coarea_errors", doubles(sc.coarea_errors)},
                   {"coarea_order", sc.coarea_order}}}};
}

Json manifest_json(Experiment e, const RunConfig& cfg, const fs::path& dir, bool complete,
                   int code, const Json& convergence) {
  Json config = Json::object();
  for (const auto& [k, v] : cfg.echo) config[k] = v;
  Json files = Json::array();
  for (const auto& f : scan_outputs(dir))
    files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return Json{{"version", GRUSHIN_VERSION},
              {"experiment", experiment_name(e)},
              {"created", manifest_timestamp()},
              {"complete", complete},
              {"exit_code", code},
              {"config", config},
              {"files", files},
              {"convergence", convergence}};
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invariant: return exit_invariant;
    case ErrorKind::convergence: return exit_convergence;
    case ErrorKind::config:
    case ErrorKind::invalid_argument:
    case ErrorKind::io: return exit_config;
  }
  return exit_invariant;
}

int run_experiment(Experiment experiment, const RunConfig& cfg, const fs::path& out_dir,
                   std::ostream& log) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    log << "error: cannot create output directory " << out_dir.string() << ": " << ec.message() << "\n";
    return exit_config;
  }
  std::unique_ptr<OutputLock> lock;
  try {
    lock = std::make_unique<OutputLock>(out_dir);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_config;
  }

  Json convergence = Json::object();
  convergence["grid"] = grid_json(cfg);
  bool complete = true;
  int code = exit_ok;
  try {
    Checks checks;
    Json results = Json::object();
    const SphereQuadrature quad =
        build_sphere_quadrature(cfg.params, cfg.quadrature_resolution, cfg.sub_resolution);
    convergence["quadrature"] = quadrature_json(cfg, quad);

    const auto emit = [&](const std::string& name) {
      Json provenance{{"version", GRUSHIN_VERSION},
                      {"experiment", experiment_name(experiment)},
                      {"grid", grid_json(cfg)},
                      {"quadrature", quadrature_json(cfg, quad)},
                      {"spectral", {{"elements", cfg.elements},
                                    {"degree", cfg.degree},
                                    {"tolerance", cfg.spectrum_tolerance}}}};
      const Json doc{{"params", params_json(cfg.params)},
                     {"results", results},
                     {"checks", checks.json()},
                     {"provenance", provenance}};
      write_file(out_dir / name, dump_json(doc));
    };

    const bool needs_solution = experiment != Experiment::spectrum;
    std::unique_ptr<Solution> sol;
    if (needs_solution) sol = compute_solution(cfg, checks, results);

    switch (experiment) {
      case Experiment::solve:
        write_file(out_dir / "solution.csv", field_csv(sol->u));
        emit("solve.json");
        break;
      case Experiment::frequency: {
        const FrequencyOut f = frequency_section(cfg, *sol, quad, checks, results);
        write_file(out_dir / "profile.csv", profile_csv(f.profile, f.dh));
        emit("frequency.json");
        break;
      }
      case Experiment::spectrum:
        spectrum_section(cfg, quad, checks, results, convergence);
        emit("spectrum.json");
        break;
      case Experiment::blowup:
        blowup_section(cfg, *sol, quad, nullptr, checks, results);
        emit("blowup.json");
        break;
      case Experiment::pohozaev:
        pohozaev_section(cfg, *sol, quad, checks, results, convergence);
        emit("pohozaev.json");
        break;
      case Experiment::report: {
        const FrequencyOut f = frequency_section(cfg, *sol, quad, checks, results);
        write_file(out_dir / "profile.csv", profile_csv(f.profile, f.dh));
        blowup_section(cfg, *sol, quad, &f, checks, results);
        pohozaev_section(cfg, *sol, quad, checks, results, convergence);
        spectrum_section(cfg, quad, checks, results, convergence);
        emit("report.json");
        break;
      }
    }
    for (const auto& c : checks.list())
      if (!c.passed)
        log << (c.hard ? "invariant failed: " : "diagnostic: ") << c.name << " = "
            << format_double(c.value) << " (limit " << format_double(c.limit) << ")\n";
    if (checks.hard_failure()) code = exit_invariant;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    code = exit_code_for(e.kind());
    complete = false;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    code = exit_invariant;
    complete = false;
  }
  try {
    write_file(out_dir / "manifest.json",
               dump_json(manifest_json(experiment, cfg, out_dir, complete, code, convergence)));
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    if (code == exit_ok) code = exit_config;
  }
  return code;
}

}  // namespace grushin

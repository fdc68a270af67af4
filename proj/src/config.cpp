#include "grushin/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "grushin/errors.hpp"
#include "grushin/grid.hpp"

namespace grushin {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (!s.empty() && s.back() == ',') out.push_back("");
  return out;
}

bool to_double(const std::string& s, double* out) {
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, *out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(*out);
}

bool to_int(const std::string& s, int* out) {
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, *out);
  return res.ec == std::errc() && res.ptr == end;
}

struct Entry {
  std::string value;
  int line;
};

class Collector {
 public:
  void add(int line, const std::string& msg) {
    errors.push_back((line > 0 ? "line " + std::to_string(line) : std::string("config")) + ": " + msg);
  }
  std::vector<std::string> errors;
};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "params.h", "params.k", "params.alpha",
      "grid.half_x", "grid.half_y", "grid.nodes",
      "solution.kind", "solution.boundary", "potential.V",
      "quadrature.resolution", "quadrature.sub_resolution", "quadrature.radial",
      "frequency.radii", "frequency.r_bar",
      "spectrum.l", "spectrum.m", "spectrum.parity", "spectrum.eigenvalues",
      "spectrum.elements", "spectrum.degree", "spectrum.tolerance",
      "blowup.epsilons", "blowup.basis_size", "blowup.ell", "blowup.vanishing_radii",
      "pohozaev.radii", "pohozaev.test_function",
      "output.dir"};
  return keys;
}

}  // namespace

std::optional<Experiment> experiment_from_name(const std::string& name) {
  if (name == "solve") return Experiment::solve;
  if (name == "frequency") return Experiment::frequency;
  if (name == "spectrum") return Experiment::spectrum;
  if (name == "blowup") return Experiment::blowup;
  if (name == "pohozaev") return Experiment::pohozaev;
  if (name == "report") return Experiment::report;
  return std::nullopt;
}

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::solve: return "solve";
    case Experiment::frequency: return "frequency";
    case Experiment::spectrum: return "spectrum";
    case Experiment::blowup: return "blowup";
    case Experiment::pohozaev: return "pohozaev";
    case Experiment::report: return "report";
  }
  return "";
}

Potential parse_builtin(const GrushinParams& params, const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "zero") return Potential::zero(params);
  const auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')')
    fail(ErrorKind::config, "unknown builtin '" + text + "'");
  const std::string name = trim(text.substr(0, open));
  const auto args = split_list(text.substr(open + 1, text.size() - open - 2));
  if (name == "constant") {
    double c = 0.0;
    if (args.size() != 1 || !to_double(args[0], &c))
      fail(ErrorKind::config, "constant(c) takes one number");
    return Potential::constant(params, c);
  }
  if (name == "polynomial") {
    if (args.empty() || (args.size() == 1 && args[0].empty()))
      fail(ErrorKind::config, "polynomial(...) needs at least one term");
    return Potential::polynomial(Polynomial::parse(params, args));
  }
  if (name == "radial-power") {
    double c = 0.0, beta = 0.0;
    if (args.size() != 2 || !to_double(args[0], &c) || !to_double(args[1], &beta))
      fail(ErrorKind::config, "radial-power(c, beta) takes two numbers");
    if (!(beta > -2.0)) fail(ErrorKind::config, "radial-power exponent must exceed -2");
    return Potential::radial_power(params, c, beta);
  }
  fail(ErrorKind::config, "unknown builtin '" + name + "'");
}

Potential RunConfig::boundary() const { return parse_builtin(params, boundary_text); }
Potential RunConfig::potential() const { return parse_builtin(params, potential_text); }
Potential RunConfig::test_function() const { return parse_builtin(params, test_function_text); }

std::vector<Parity> RunConfig::effective_parities() const {
  if (!parities.empty()) return parities;
  if (params.h() == 1) return {Parity::even, Parity::odd};
  return {Parity::none};
}

ConfigParse parse_config(const std::string& text) {
  Collector err;
  std::map<std::string, Entry> entries;
  std::vector<std::pair<std::string, std::string>> echo;
  {
    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
      ++line_no;
      const auto hash = raw.find('#');
      const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        err.add(line_no, "expected 'section.key = value'");
        continue;
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
        err.add(line_no, "unknown key '" + key + "'");
        continue;
      }
      if (value.empty()) {
        err.add(line_no, "missing value for '" + key + "'");
        continue;
      }
      const auto it = entries.find(key);
      if (it != entries.end()) {
        err.add(line_no, "duplicate key '" + key + "' (lines " + std::to_string(it->second.line) +
                             " and " + std::to_string(line_no) + ")");
        continue;
      }
      entries[key] = {value, line_no};
      echo.emplace_back(key, value);
    }
  }

  const auto line_of = [&](const std::string& key) {
    const auto it = entries.find(key);
    return it == entries.end() ? 0 : it->second.line;
  };
  const auto get_int = [&](const std::string& key, int* out, int lo, int hi, const std::string& what) {
    const auto it = entries.find(key);
    if (it == entries.end()) return false;
    int v = 0;
    if (!to_int(it->second.value, &v) || v < lo || v > hi) {
      err.add(it->second.line, what);
      return false;
    }
    *out = v;
    return true;
  };
  const auto get_double = [&](const std::string& key, double* out, const std::string& what,
                              const std::function<bool(double)>& ok) {
    const auto it = entries.find(key);
    if (it == entries.end()) return false;
    double v = 0.0;
    if (!to_double(it->second.value, &v) || !ok(v)) {
      err.add(it->second.line, what);
      return false;
    }
    *out = v;
    return true;
  };
  const auto get_doubles = [&](const std::string& key, std::vector<double>* out,
                               const std::string& what) {
    const auto it = entries.find(key);
    if (it == entries.end()) return false;
    std::vector<double> v;
    for (const auto& item : split_list(it->second.value)) {
      double d = 0.0;
      if (!to_double(item, &d)) {
        err.add(it->second.line, what + ": '" + item + "' is not a number");
        return false;
      }
      v.push_back(d);
    }
    *out = v;
    return true;
  };
  const auto get_ints = [&](const std::string& key, std::vector<int>* out, const std::string& what) {
    const auto it = entries.find(key);
    if (it == entries.end()) return false;
    std::vector<int> v;
    for (const auto& item : split_list(it->second.value)) {
      int d = 0;
      if (!to_int(item, &d) || d < 0 || d > 32) {
        err.add(it->second.line, what);
        return false;
      }
      v.push_back(d);
    }
    *out = v;
    return true;
  };

  RunConfig cfg;
  cfg.echo = echo;

  int h = -1, k = -1, alpha = -1;
  bool params_ok = true;
  for (const auto& [key, dst, name] :
       {std::tuple<const char*, int*, const char*>{"params.h", &h, "h"},
        {"params.k", &k, "k"},
        {"params.alpha", &alpha, "alpha"}}) {
    if (!entries.count(key)) {
      err.add(0, std::string("missing required key '") + key + "'");
      params_ok = false;
      continue;
    }
    const int lo = std::string(name) == "alpha" ? 0 : 1;
    const std::string msg = std::string(name) + (lo == 0 ? " must be a nonnegative integer"
                                                          : " must be a positive integer");
    if (!get_int(key, dst, lo, 16, msg)) params_ok = false;
  }
  if (params_ok) {
    if (h > 3 || k > 3) {
      err.add(line_of(h > 3 ? "params.h" : "params.k"), "h and k must not exceed 3");
      params_ok = false;
    } else {
      cfg.params = GrushinParams(h, k, alpha);
    }
  }

  const auto positive = [](double v) { return v > 0.0; };
  get_double("grid.half_x", &cfg.half_x, "grid.half_x must be a positive number", positive);
  get_double("grid.half_y", &cfg.half_y, "grid.half_y must be a positive number", positive);
  get_int("grid.nodes", &cfg.nodes, 17, 1025, "grid.nodes must be an odd integer in [17, 1025]");
  if (cfg.nodes % 2 == 0) err.add(line_of("grid.nodes"), "grid.nodes must be odd");
  if (params_ok && cfg.params.n() == 3 && cfg.nodes > 129)
    err.add(line_of("grid.nodes"), "grid.nodes must not exceed 129 in three dimensions");

  if (entries.count("solution.kind")) {
    const auto& v = entries["solution.kind"].value;
    if (v == "dirichlet") cfg.solution = SolutionKind::dirichlet;
    else if (v == "eigen") cfg.solution = SolutionKind::eigen;
    else err.add(line_of("solution.kind"), "solution.kind must be 'dirichlet' or 'eigen'");
  }
  if (entries.count("solution.boundary")) cfg.boundary_text = entries["solution.boundary"].value;
  if (entries.count("potential.V")) cfg.potential_text = entries["potential.V"].value;
  if (entries.count("pohozaev.test_function"))
    cfg.test_function_text = entries["pohozaev.test_function"].value;
  if (entries.count("output.dir")) cfg.output_dir = entries["output.dir"].value;

  get_int("quadrature.resolution", &cfg.quadrature_resolution, 8, 512,
          "quadrature.resolution must be an integer in [8, 512]");
  get_int("quadrature.sub_resolution", &cfg.sub_resolution, 0, 256,
          "quadrature.sub_resolution must be an integer in [0, 256]");
  get_int("quadrature.radial", &cfg.radial_resolution, 2, 256,
          "quadrature.radial must be an integer in [2, 256]");

  get_doubles("frequency.radii", &cfg.radii, "frequency.radii");
  double rbar = 0.0;
  if (get_double("frequency.r_bar", &rbar, "frequency.r_bar must be a positive number", positive))
    cfg.r_bar = rbar;

  get_ints("spectrum.l", &cfg.sector_l, "spectrum.l must list integers in [0, 32]");
  get_ints("spectrum.m", &cfg.sector_m, "spectrum.m must list integers in [0, 32]");
  if (entries.count("spectrum.parity")) {
    for (const auto& item : split_list(entries["spectrum.parity"].value)) {
      if (item == "none") cfg.parities.push_back(Parity::none);
      else if (item == "even") cfg.parities.push_back(Parity::even);
      else if (item == "odd") cfg.parities.push_back(Parity::odd);
      else err.add(line_of("spectrum.parity"), "spectrum.parity entries must be none, even or odd");
    }
  }
  get_int("spectrum.eigenvalues", &cfg.eigenvalues, 1, 64,
          "spectrum.eigenvalues must be an integer in [1, 64]");
  get_int("spectrum.elements", &cfg.elements, 1, 64, "spectrum.elements must be an integer in [1, 64]");
  get_int("spectrum.degree", &cfg.degree, 2, 16, "spectrum.degree must be an integer in [2, 16]");
  get_double("spectrum.tolerance", &cfg.spectrum_tolerance,
             "spectrum.tolerance must be a positive number", positive);

  get_doubles("blowup.epsilons", &cfg.epsilons, "blowup.epsilons");
  get_int("blowup.basis_size", &cfg.basis_size, 1, 64, "blowup.basis_size must be an integer in [1, 64]");
  if (entries.count("blowup.ell") && entries["blowup.ell"].value != "auto") {
    double e = 0.0;
    if (get_double("blowup.ell", &e, "blowup.ell must be 'auto' or a nonnegative number",
                   [](double v) { return v >= 0.0; }))
      cfg.ell = e;
  }
  get_doubles("blowup.vanishing_radii", &cfg.vanishing_radii, "blowup.vanishing_radii");
  get_doubles("pohozaev.radii", &cfg.pohozaev_radii, "pohozaev.radii");

  // Cross-key validation.
  if (params_ok) {
    try {
      GridSpec::centered(cfg.params, cfg.half_x, cfg.half_y, cfg.nodes);
    } catch (const Error& e) {
      err.add(line_of("grid.nodes"), e.what());
    }
    for (const auto& [key, text] :
         {std::pair<std::string, std::string>{"solution.boundary", cfg.boundary_text},
          {"potential.V", cfg.potential_text},
          {"pohozaev.test_function", cfg.test_function_text}}) {
      try {
        parse_builtin(cfg.params, text);
      } catch (const Error& e) {
        err.add(line_of(key), e.what());
      }
    }
    if (cfg.solution == SolutionKind::eigen && trim(cfg.potential_text) != "zero")
      err.add(line_of("potential.V"), "eigen solutions use V = lambda; potential.V must be zero");
    if (h == 1)
      for (int l : cfg.sector_l)
        if (l != 0) err.add(line_of("spectrum.l"), "spectrum.l must be 0 when h = 1");
    if (k == 1)
      for (int m : cfg.sector_m)
        if (m != 0) err.add(line_of("spectrum.m"), "spectrum.m must be 0 when k = 1");
    if (h >= 2)
      for (Parity p : cfg.parities)
        if (p != Parity::none) err.add(line_of("spectrum.parity"), "parity applies only when h = 1");

    // A gauge ball of radius r lies in |x_i| <= r, |y_j| <= r^(alpha+1)/(alpha+1).
    const double a1 = alpha + 1.0;
    const auto inside = [&](double r) {
      return r <= cfg.half_x && std::pow(r, a1) / a1 <= cfg.half_y;
    };
    const auto check_list = [&](const std::string& key, const std::vector<double>& v,
                                bool increasing, bool decreasing) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        char buf[160];
        if (!(v[i] > 0.0)) {
          std::snprintf(buf, sizeof buf, "%s entries must be positive", key.c_str());
          err.add(line_of(key), buf);
          return;
        }
        if (!inside(v[i])) {
          std::snprintf(buf, sizeof buf, "%s entry %.17g: gauge ball exits the grid domain",
                        key.c_str(), v[i]);
          err.add(line_of(key), buf);
          return;
        }
        if (i > 0 && increasing && !(v[i] > v[i - 1])) {
          err.add(line_of(key), key + " must be strictly increasing");
          return;
        }
        if (i > 0 && decreasing && !(v[i] < v[i - 1])) {
          err.add(line_of(key), key + " must be strictly decreasing");
          return;
        }
      }
    };
    check_list("frequency.radii", cfg.radii, true, false);
    check_list("blowup.epsilons", cfg.epsilons, false, true);
    check_list("blowup.vanishing_radii", cfg.vanishing_radii, true, false);
    check_list("pohozaev.radii", cfg.pohozaev_radii, true, false);
    if (cfg.r_bar)
      for (double r : cfg.radii)
        if (r > *cfg.r_bar) {
          err.add(line_of("frequency.radii"), "frequency.radii exceed frequency.r_bar");
          break;
        }
  }

  ConfigParse out;
  out.errors = err.errors;
  if (out.errors.empty()) out.config = std::move(cfg);
  return out;
}

}  // namespace grushin

#pragma once

// Run configuration: a flat text format with one `section.key = value` per line, `#`
// comments and comma-separated lists. Parsing reports every violation with its line number.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grushin/builtins.hpp"
#include "grushin/geometry.hpp"
#include "grushin/spectrum.hpp"

namespace grushin {

enum class Experiment { solve, frequency, spectrum, blowup, pohozaev, report };

std::optional<Experiment> experiment_from_name(const std::string& name);
std::string experiment_name(Experiment e);

enum class SolutionKind { dirichlet, eigen };

struct RunConfig {
  GrushinParams params{1, 1, 1};

  double half_x = 1.0, half_y = 1.0;
  int nodes = 129;

  SolutionKind solution = SolutionKind::dirichlet;
  std::string boundary_text = "polynomial(1*x1)";
  std::string potential_text = "zero";

  int quadrature_resolution = 64;
  int sub_resolution = 0;
  int radial_resolution = 32;

  std::vector<double> radii{0.1, 0.125, 0.15, 0.175, 0.2, 0.225, 0.25,
                            0.275, 0.3, 0.325, 0.35, 0.375, 0.4};
  std::optional<double> r_bar;

  std::vector<int> sector_l{0};
  std::vector<int> sector_m{0};
  std::vector<Parity> parities;  // empty: none for h >= 2, even and odd for h = 1
  int eigenvalues = 6;
  int elements = 8;
  int degree = 10;
  double spectrum_tolerance = 1e-8;

  std::vector<double> epsilons{0.4, 0.2, 0.1};
  int basis_size = 12;
  std::optional<double> ell;  // empty: estimated from the frequency profile
  std::vector<double> vanishing_radii;  // empty: the frequency radii

  std::vector<double> pohozaev_radii{0.3};
  std::string test_function_text = "polynomial(1, 1*x1^2, 1*y1)";

  std::string output_dir = "out";

  /// Every key as written, in file order, for the manifest.
  std::vector<std::pair<std::string, std::string>> echo;

  Potential boundary() const;
  Potential potential() const;
  Potential test_function() const;
  std::vector<Parity> effective_parities() const;
};

struct ConfigParse {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;  // "line N: message"
};

ConfigParse parse_config(const std::string& text);

/// Parses one builtin: zero, constant(c), polynomial(term, ...), radial-power(c, beta).
Potential parse_builtin(const GrushinParams& params, const std::string& text);

}  // namespace grushin

// grushin-lab: command-line driver for the Grushin operator experiments.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "grushin/config.hpp"
#include "grushin/geometry.hpp"
#include "grushin/parallel.hpp"
#include "grushin/run.hpp"

namespace {

std::optional<grushin::RunConfig> load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config " << path << "\n";
    return std::nullopt;
  }
  std::ostringstream text;
  text << in.rdbuf();
  grushin::ConfigParse parsed = grushin::parse_config(text.str());
  for (const auto& e : parsed.errors) std::cerr << path << ": " << e << "\n";
  return parsed.config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the Grushin operator"};
  app.require_subcommand(0, 1);

  bool version = false;
  std::string version_config;
  app.add_flag("--version", version, "Print the version and the formula table");
  app.add_option("--config", version_config, "Parameters for the --version formula table");

  std::string config_path, out_dir;
  int threads = 1;
  std::vector<CLI::App*> subs;
  for (const char* name : {"solve", "frequency", "spectrum", "blowup", "pohozaev", "report"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Config file")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--threads", threads, "Worker count, 0 for all cores")
        ->check(CLI::Range(0, 1024));
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : grushin::exit_config;
  }

  if (version) {
    std::cout << "grushin-lab " << GRUSHIN_VERSION << "\n";
    grushin::GrushinParams params{1, 1, 1};
    if (!version_config.empty()) {
      auto cfg = load(version_config);
      if (!cfg) return grushin::exit_config;
      params = cfg->params;
    }
    std::cout << grushin::formula_table(params);
    return grushin::exit_ok;
  }

  CLI::App* chosen = nullptr;
  for (CLI::App* sub : subs)
    if (sub->parsed()) chosen = sub;
  if (chosen == nullptr) {
    std::cerr << app.help();
    return grushin::exit_config;
  }

  auto cfg = load(config_path);
  if (!cfg) return grushin::exit_config;
  const auto experiment = grushin::experiment_from_name(chosen->get_name());
  grushin::set_worker_count(static_cast<unsigned>(threads));
  const std::filesystem::path dir = out_dir.empty() ? cfg->output_dir : out_dir;
  const int code = grushin::run_experiment(*experiment, *cfg, dir, std::cerr);
  if (code == grushin::exit_ok) std::cout << "wrote " << dir.string() << "\n";
  return code;
}

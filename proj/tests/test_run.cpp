#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "grushin/config.hpp"
#include "grushin/parallel.hpp"
#include "grushin/run.hpp"
#include "grushin/writers.hpp"

using namespace grushin;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig config(const std::string& extra) {
  const ConfigParse c = parse_config("params.h = 1\nparams.k = 1\nparams.alpha = 1\ngrid.nodes = 65\n" + extra);
  if (!c.config) throw std::runtime_error(c.errors.empty() ? "config" : c.errors[0]);
  return *c.config;
}

fs::path fresh(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("grushin_run_" + name);
  fs::remove_all(d);
  return d;
}

int run(Experiment e, const RunConfig& cfg, const fs::path& dir) {
  std::ostringstream log;
  return run_experiment(e, cfg, dir, log);
}

}  // namespace

TEST(Run, FrequencyOutputsAndManifest) {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  const fs::path d = fresh("frequency");
  ASSERT_EQ(run(Experiment::frequency, config("solution.boundary = polynomial(1*y1)\n"), d), exit_ok);
  const std::string csv = slurp(d / "profile.csv");
  EXPECT_EQ(csv.rfind("r,H,D,N,dh_residual\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 14);

  const Json doc = Json::parse(slurp(d / "frequency.json"));
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"params", "results", "checks", "provenance"}));
  for (double n : doc["results"]["frequency"]["N"]) EXPECT_NEAR(n, 2.0, 1e-6);

  const Json man = Json::parse(slurp(d / "manifest.json"));
  EXPECT_TRUE(man["complete"].get<bool>());
  EXPECT_EQ(man["created"], "1970-01-01T00:00:00Z");
  EXPECT_EQ(man["config"]["grid.nodes"], "65");
  ASSERT_EQ(man["files"].size(), 2u);
  for (const auto& f : man["files"]) {
    const std::string bytes = slurp(d / f["name"].get<std::string>());
    EXPECT_EQ(f["bytes"].get<std::size_t>(), bytes.size());
    EXPECT_EQ(f["sha256"], sha256_hex(bytes));
  }
  EXPECT_FALSE(fs::exists(d / ".lock"));
  unsetenv("SOURCE_DATE_EPOCH");
}

TEST(Run, SpectrumNeedsNoGrid) {
  const fs::path d = fresh("spectrum");
  const RunConfig cfg = config("spectrum.eigenvalues = 4\n");
  ASSERT_EQ(run(Experiment::spectrum, cfg, d), exit_ok);
  const Json doc = Json::parse(slurp(d / "spectrum.json"));
  EXPECT_FALSE(doc["results"]["spectrum"]["authoritative"].get<bool>());
  EXPECT_EQ(doc["results"]["spectrum"]["sectors"].size(), 2u);
  EXPECT_FALSE(fs::exists(d / "solution.csv"));
}

TEST(Run, InvariantFailureExitsOne) {
  // Zero boundary data gives u = 0 and H = 0.
  const fs::path d = fresh("invariant");
  EXPECT_EQ(run(Experiment::frequency, config("solution.boundary = zero\n"), d), exit_invariant);
  const Json man = Json::parse(slurp(d / "manifest.json"));
  EXPECT_FALSE(man["complete"].get<bool>());
  EXPECT_EQ(man["exit_code"], 1);
}

TEST(Run, NonConvergenceExitsThree) {
  const fs::path d = fresh("convergence");
  EXPECT_EQ(run(Experiment::spectrum, config("spectrum.elements = 1\nspectrum.degree = 4\nspectrum.eigenvalues = 3\nspectrum.tolerance = 1e-12\n"), d),
            exit_convergence);
}

TEST(Run, HeldLockIsRefused) {
  const fs::path d = fresh("locked");
  fs::create_directories(d);
  OutputLock lock(d);
  EXPECT_EQ(run(Experiment::solve, config(""), d), exit_config);
}

TEST(Run, ByteIdenticalAcrossWorkers) {
  setenv("SOURCE_DATE_EPOCH", "1", 1);
  const RunConfig cfg = config("blowup.ell = 1\nspectrum.eigenvalues = 3\n");
  std::vector<std::string> manifests, reports;
  for (unsigned w : {1u, 3u, 8u}) {
    set_worker_count(w);
    const fs::path d = fresh("workers" + std::to_string(w));
    ASSERT_EQ(run(Experiment::report, cfg, d), exit_ok);
    manifests.push_back(slurp(d / "manifest.json"));
    reports.push_back(slurp(d / "report.json"));
  }
  set_worker_count(1);
  for (std::size_t i = 1; i < 3; ++i) {
    EXPECT_EQ(manifests[0], manifests[i]);
    EXPECT_EQ(reports[0], reports[i]);
  }
  unsetenv("SOURCE_DATE_EPOCH");
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ErrorKind::invariant), 1);
  EXPECT_EQ(exit_code_for(ErrorKind::config), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::invalid_argument), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::io), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::convergence), 3);
}

// The command-line binary, through the shell.
class Cli : public ::testing::Test {
 protected:
  static int exec(const std::string& args) {
    const int status = std::system((std::string(GRUSHIN_LAB) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  static fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
  }
};

TEST_F(Cli, Version) { EXPECT_EQ(exec("--version"), 0); }

TEST_F(Cli, ConfigErrorsExitTwoWithoutOutput) {
  const fs::path cfg = write_config("grushin_bad.cfg", "params.h = 1\nparams.k = 1\nparams.alpha = 0.5\n");
  const fs::path out = fresh("cli_bad");
  EXPECT_EQ(exec("solve --config " + cfg.string() + " --out " + out.string()), 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(exec("solve --config /nonexistent.cfg"), 2);
  EXPECT_EQ(exec("solve"), 2);
  EXPECT_EQ(exec("plot --config " + cfg.string()), 2);
}

TEST_F(Cli, SolveWritesOutputs) {
  const fs::path cfg = write_config("grushin_ok.cfg", "params.h = 1\nparams.k = 1\nparams.alpha = 1\ngrid.nodes = 33\n");
  const fs::path out = fresh("cli_ok");
  EXPECT_EQ(exec("solve --config " + cfg.string() + " --out " + out.string() + " --threads 2"), 0);
  EXPECT_TRUE(fs::exists(out / "solution.csv"));
  EXPECT_TRUE(fs::exists(out / "solve.json"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
}

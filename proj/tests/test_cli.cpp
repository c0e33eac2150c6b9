// End-to-end tests driving the command-line tool as a subprocess.
// CHIRPFIT_CLI_PATH is injected by the build and points at the binary.
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chirpfit/asymptotics.hpp"
#include "chirpfit/signal.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Scratch directory shared by all cases in this file; fresh per test run.
const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::path("cli_scratch");
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  const fs::path out_file = scratch() / "stdout.txt";
  const fs::path err_file = scratch() / "stderr.txt";
  const std::string cmd = std::string(CHIRPFIT_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string item;
    std::istringstream ls(line);
    while (std::getline(ls, item, ',')) fields.push_back(item);
    rows.push_back(fields);
  }
  return rows;
}

std::string path_of(const char* name) { return (scratch() / name).string(); }

}  // namespace

TEST_CASE("version flag reports the tool version") {
  auto r = run_cli("--version");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("chirpfit 1.0.0") != std::string::npos);
}

TEST_CASE("bare invocation without a subcommand is a usage error") {
  auto r = run_cli("");
  CHECK(r.exit_code == 1);
}

TEST_CASE("synthesize then estimate recovers the written parameters") {
  const std::string y = path_of("clean.csv");
  auto r = run_cli("synth --components 5:0:0.5 --n 101 --sigma2 0 --out " + y);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("wrote " + y) != std::string::npos);
  CHECK(fs::exists(y));
  CHECK(fs::exists(y + ".manifest"));
  const std::string manifest = slurp(y + ".manifest");
  CHECK(manifest.find("subcommand = synth") != std::string::npos);
  CHECK(manifest.find("components") != std::string::npos);

  const std::string fit_csv = path_of("clean_fit.csv");
  r = run_cli("estimate --in " + y + " --method lse --out " + fit_csv);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("method: lse") != std::string::npos);
  auto rows = read_csv(fit_csv);
  REQUIRE(rows.size() == 2);  // header + one component
  CHECK(rows[0][0] == "k");
  REQUIRE(rows[1].size() == 5);
  CHECK(std::stod(rows[1][1]) == doctest::Approx(5.0).epsilon(1e-4));
  CHECK(std::abs(std::stod(rows[1][3]) - 0.5) < 1e-8);
  CHECK(fs::exists(fit_csv + ".manifest"));
}

TEST_CASE("noisy synth reports per-component snr") {
  const std::string y = path_of("noisy1.csv");
  auto r = run_cli("synth --components 5:0:0.5 --n 101 --sigma2 2 --seed 7 --out " + y);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("snr") != std::string::npos);
  CHECK(r.out.find("dB") != std::string::npos);
}

TEST_CASE("sequential estimate writes one fit row per component") {
  const std::string y = path_of("two.csv");
  auto r = run_cli(
      "synth --components 7:0:1.2,5:0:0.4 --n 201 --sigma2 0.25 --seed 3 "
      "--out " + y);
  REQUIRE(r.exit_code == 0);
  const std::string fit_csv = path_of("two_fit.csv");
  r = run_cli("estimate --in " + y + " --method seq-lse --p 2 --out " +
              fit_csv);
  REQUIRE(r.exit_code == 0);
  auto rows = read_csv(fit_csv);
  REQUIRE(rows.size() == 3);
  // Stronger component first; both rates recovered.
  CHECK(std::abs(std::stod(rows[1][3]) - 1.2) < 1e-3);
  CHECK(std::abs(std::stod(rows[2][3]) - 0.4) < 1e-3);
  const double rss1 = std::stod(rows[1][4]);
  const double rss2 = std::stod(rows[2][4]);
  CHECK(rss2 < rss1);
  // Least-squares fit on noisy data attaches the closed-form covariance.
  CHECK(fs::exists(fit_csv + ".cov.csv"));
  auto cov = read_csv(fit_csv + ".cov.csv");
  REQUIRE(cov.size() == 1 + 2 * 9);
  CHECK(cov[0][0] == "component");
}

TEST_CASE("every scan kernel writes a grid table and reports its peak") {
  const std::string y = path_of("scan_in.csv");
  auto r = run_cli("synth --components 4:3:0.5 --n 101 --sigma2 0 --out " + y);
  REQUIRE(r.exit_code == 0);
  for (const std::string kernel : {"ptf", "cpf", "pcpf", "dechirp"}) {
    const std::string out = path_of(("scan_" + kernel + ".csv").c_str());
    r = run_cli("scan --in " + y + " --kernel " + kernel + " --out " + out);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("peak:") != std::string::npos);
    auto rows = read_csv(out);
    REQUIRE(rows.size() > 2);
    CHECK(rows[0][0] == "location");
    CHECK(rows[0][1] == "magnitude");
    CHECK(fs::exists(out + ".manifest"));
  }
  // The quadratic-rate kernel peaks at the planted rate.
  auto rows = read_csv(path_of("scan_ptf.csv"));
  double best_loc = 0.0, best_mag = -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double mag = std::stod(rows[i][1]);
    if (mag > best_mag) {
      best_mag = mag;
      best_loc = std::stod(rows[i][0]);
    }
  }
  CHECK(std::abs(best_loc - 0.5) < 2.0 * M_PI / (101.0 * 101.0) + 1e-12);
}

TEST_CASE("usage errors exit with code 1") {
  const std::string y = path_of("usage.csv");
  REQUIRE(run_cli("synth --components 5:0:0.5 --n 64 --sigma2 0 --out " + y)
              .exit_code == 0);
  CHECK(run_cli("estimate --in " + y + " --method cpf --p 2").exit_code == 1);
  CHECK(run_cli("estimate --in " + y + " --method nonsense").exit_code == 1);
  CHECK(run_cli("estimate --in " + y + " --method lse --p 2").exit_code == 1);
  // Two initial rates required for a two-component sequential fit.
  auto r = run_cli("estimate --in " + y +
                   " --method seq-lse --p 2 --init-beta 0.5");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("init-beta") != std::string::npos);
}

TEST_CASE("data errors exit with code 2") {
  CHECK(run_cli("estimate --in no_such_file.csv --method lse").exit_code == 2);
  const std::string cfg = path_of("bad.cfg");
  std::ofstream(cfg) << "components = 5:0:0.5\nn_values = 64\n"
                     << "sigma2_values = 1\nmethods = lse\n"
                     << "replications = 2\nwhatever = 3\n";
  auto r = run_cli("mc --config " + cfg + " --out " + path_of("bad_out"));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("unknown key") != std::string::npos);
}

TEST_CASE("variance table matches the library closed form") {
  auto r = run_cli("avar --components 5:0:0.5 --sigma2 2 --n 101");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("component,parameter,variance") != std::string::npos);
  // Pull the rate row out of stdout and compare against the direct call.
  double printed = -1.0;
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("1,beta,", 0) == 0) printed = std::stod(line.substr(7));
  }
  REQUIRE(printed > 0.0);
  chirpfit::ChirpComponent c{5.0, 0.0, 0.5};
  const auto v = chirpfit::finite_n_variances(c, 2.0, 101);
  CHECK(printed == doctest::Approx(v[2]).epsilon(1e-12));
}

TEST_CASE("experiment manifest reruns to an identical table") {
  const std::string cfg = path_of("exp.cfg");
  std::ofstream(cfg) << "components = 5:0:0.5\nn_values = 64\n"
                     << "sigma2_values = 1\nmethods = lse\n"
                     << "replications = 4\nbase_seed = 9\n";
  const std::string dir1 = path_of("mc1");
  const std::string dir2 = path_of("mc2");
  auto r = run_cli("mc --config " + cfg + " --out " + dir1);
  REQUIRE(r.exit_code == 0);
  REQUIRE(fs::exists(fs::path(dir1) / "mse_table.csv"));
  REQUIRE(fs::exists(fs::path(dir1) / "manifest.txt"));

  // The manifest's key=value section is itself a complete config.
  r = run_cli("mc --config " + (fs::path(dir1) / "manifest.txt").string() +
              " --out " + dir2);
  REQUIRE(r.exit_code == 0);

  auto t1 = read_csv(fs::path(dir1) / "mse_table.csv");
  auto t2 = read_csv(fs::path(dir2) / "mse_table.csv");
  REQUIRE(t1.size() == t2.size());
  REQUIRE(t1.size() == 4);  // header + a_re, a_im, beta
  for (std::size_t i = 0; i < t1.size(); ++i) {
    REQUIRE(t1[i].size() == t2[i].size());
    for (std::size_t j = 0; j < t1[i].size(); ++j) {
      if (j == 7) continue;  // mean_runtime_s is wall-clock, not seeded
      CHECK(t1[i][j] == t2[i][j]);
    }
  }
}

TEST_CASE("real-data workflow writes the full report bundle") {
  const std::string y = path_of("real.csv");
  auto r = run_cli(
      "synth --components 7:0:1.2,5:0:0.4 --n 201 --sigma2 1 --seed 5 "
      "--out " + y);
  REQUIRE(r.exit_code == 0);
  const std::string dir = path_of("real_out");
  r = run_cli("fit-real --in " + y +
              " --max-order 4 --tau 0.1 --lb-lags 20 --out " + dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("selected order = 2") != std::string::npos);

  const fs::path d(dir);
  REQUIRE(fs::exists(d / "report.txt"));
  REQUIRE(fs::exists(d / "fit.csv"));
  REQUIRE(fs::exists(d / "fitted.csv"));
  REQUIRE(fs::exists(d / "residuals.csv"));
  REQUIRE(fs::exists(d / "manifest.txt"));

  const std::string report = slurp(d / "report.txt");
  CHECK(report.find("selected order = 2") != std::string::npos);
  CHECK(report.find("saturated = no") != std::string::npos);
  CHECK(report.find("whiteness") != std::string::npos);

  auto fit_rows = read_csv(d / "fit.csv");
  REQUIRE(fit_rows.size() == 3);  // header + two selected components
  auto fitted = read_csv(d / "fitted.csv");
  auto resid = read_csv(d / "residuals.csv");
  CHECK(fitted.size() == 202);  // header + 201 samples
  CHECK(resid.size() == 202);
}

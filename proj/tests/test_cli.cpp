#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "nvdr/io.hpp"
#include "nvdr/sweep.hpp"

// drives the installed binary end to end through a shell; NVDR_CLI_PATH is
// injected by the build so the tests always hit the freshly linked tool

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out_file = dir / "stdout.txt";
  const fs::path err_file = dir / "stderr.txt";
  const std::string cmd = std::string(NVDR_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WEXITSTATUS(rc);
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("nvdr_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kTwoSpin = R"({
  "system": {
    "bz_gauss": 1840.0,
    "nuclei": [
      {"label": "C2", "a_par_khz": -11.3, "a_perp_khz": 40.0},
      {"label": "C5", "a_par_khz": 38.0, "a_perp_khz": 25.0}
    ]
  },
  "protocol": {"tag": "pm_hhdr", "omega_prime_khz": 104.0, "t_f_us": 300.0},
  "sweep": {"swept": "nu", "start": 1839.0, "stop": 1889.0, "step": 2.0,
            "composition": "independent"},
  "noise": {"relative_std": 0.0, "shots": 1, "seed": 3},
  "output": {"spectrum_csv": "two.csv", "report_json": "two.json",
             "manifest_json": "two_manifest.json"}
})";

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

using namespace nvdr;

TEST_CASE("sweep emits spectrum, report and manifest, and fit round-trips") {
  TempDir tmp("sweep");
  write_file(tmp.path / "two.json.cfg", kTwoSpin);

  auto sweep = run_cli("sweep --config " + (tmp.path / "two.json.cfg").string() +
                           " --out-dir " + (tmp.path / "run").string(),
                       tmp.path);
  CAPTURE(sweep.err);
  REQUIRE(sweep.exit_code == 0);
  REQUIRE(fs::exists(tmp.path / "run" / "two.csv"));
  REQUIRE(fs::exists(tmp.path / "run" / "two.json"));
  REQUIRE(fs::exists(tmp.path / "run" / "two_manifest.json"));

  // stdout carries one row per dip with the assigned coupling in column 4
  std::istringstream lines(sweep.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "center_khz,width_khz,depth,a_par_khz,ambiguous");
  std::vector<double> couplings;
  while (std::getline(lines, line)) {
    std::istringstream row(line);
    std::string cell;
    for (int c = 0; c < 4; ++c) std::getline(row, cell, ',');
    couplings.push_back(std::stod(cell));
  }
  REQUIRE(couplings.size() == 2);
  CHECK(std::abs(couplings[0] - 38.0) < 1.0);
  CHECK(std::abs(couplings[1] + 11.3) < 1.0);

  // feeding the emitted spectrum back through fit reproduces the couplings
  auto refit = run_cli("fit " + (tmp.path / "run" / "two.csv").string() +
                           " --out-dir " + (tmp.path / "refit").string(),
                       tmp.path);
  REQUIRE(refit.exit_code == 0);
  CHECK(refit.out == sweep.out);
  CHECK(fs::exists(tmp.path / "refit" / "report.json"));
  CHECK(fs::exists(tmp.path / "refit" / "manifest.json"));
}

TEST_CASE("config errors exit 1 and write nothing") {
  TempDir tmp("cfgerr");
  std::string bad = kTwoSpin;
  const auto pos = bad.find("1840.0");
  bad.replace(pos, 6, "-5.0");
  write_file(tmp.path / "bad.cfg", bad);

  auto r = run_cli("sweep --config " + (tmp.path / "bad.cfg").string() +
                       " --out-dir " + (tmp.path / "run").string(),
                   tmp.path);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("config error") != std::string::npos);
  CHECK(!fs::exists(tmp.path / "run"));

  SUBCASE("unknown key names the key") {
    std::string extra = kTwoSpin;
    extra.insert(extra.rfind('}'), R"(, "spurious": 1)");
    write_file(tmp.path / "extra.cfg", extra);
    auto e = run_cli("sweep --config " + (tmp.path / "extra.cfg").string() +
                         " --out-dir " + (tmp.path / "run").string(),
                     tmp.path);
    CHECK(e.exit_code == 1);
    CHECK(e.err.find("spurious") != std::string::npos);
    CHECK(!fs::exists(tmp.path / "run"));
  }

  SUBCASE("missing subcommand and unknown flags are usage errors") {
    CHECK(run_cli("", tmp.path).exit_code == 1);
    CHECK(run_cli("sweep --frobnicate", tmp.path).exit_code == 1);
  }
}

TEST_CASE("fit on a flat spectrum yields an empty report and exit 0") {
  TempDir tmp("flat");

  Spectrum flat;
  flat.plan.protocol = Protocol::PmHhdr;
  flat.plan.swept = SweptParameter::Nu;
  flat.plan.fixed.omega_prime_khz = 104.0;
  flat.plan.fixed.t_f_us = 300.0;
  for (int i = 0; i < 40; ++i) flat.plan.grid.push_back(1850.0 + 2.0 * i);
  flat.larmor_khz = 1970.3456;
  for (double x : flat.plan.grid) flat.points.push_back({x, 1.0});
  write_spectrum_csv((tmp.path / "flat.csv").string(), flat);

  auto r = run_cli("fit " + (tmp.path / "flat.csv").string() + " --out-dir " +
                       (tmp.path / "out").string() + " --format json",
                   tmp.path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("\"dips\": []") != std::string::npos);
}

TEST_CASE("predict prints both sideband positions") {
  TempDir tmp("predict");
  auto r = run_cli("predict --bz 1840 --apar -11.3 --omega 104", tmp.path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("1871.9") != std::string::npos);
  CHECK(r.out.find("2079.9") != std::string::npos);
}

TEST_CASE("power reports the scheme comparison") {
  TempDir tmp("power");
  auto r = run_cli("power --omega 1970 --omega-prime 104", tmp.path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("peak ratio pm_hhdr/hhdr") != std::string::npos);
  CHECK(r.out.find("1/89.7") != std::string::npos);

  SUBCASE("single scheme via --scheme") {
    auto one = run_cli("power --scheme pm --omega-prime 104", tmp.path);
    REQUIRE(one.exit_code == 0);
    CHECK(one.out.find("pm_hhdr: drive 104 kHz") != std::string::npos);
    CHECK(one.out.find("hhdr: drive 1970") == std::string::npos);
  }

  SUBCASE("table written only when asked") {
    auto w = run_cli("power --omega 1970 --omega-prime 104 --out-dir " +
                         (tmp.path / "tbl").string(),
                     tmp.path);
    REQUIRE(w.exit_code == 0);
    CHECK(fs::exists(tmp.path / "tbl" / "power.csv"));
    CHECK(fs::exists(tmp.path / "tbl" / "manifest.json"));
  }
}

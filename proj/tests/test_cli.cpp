// Drives the installed CLI binary end to end: formats, exit codes, and
// rerun determinism.
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "depspec/slcs.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWorkDir = fs::temp_directory_path() / "depspec_cli_test";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DEPSPEC_CLI_PATH) + " " + args +
                          " > /dev/null 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string out(const std::string& name) { return (kWorkDir / name).string(); }

struct WorkDirSetup {
  WorkDirSetup() {
    fs::remove_all(kWorkDir);
    fs::create_directories(kWorkDir);
  }
} setup_once;

}  // namespace

TEST_CASE("spectrum subcommand: builtins") {
  REQUIRE(run_cli("spectrum --builtin parity --n 3 --out " + out("par3")) == 0);
  CHECK(slurp(out("par3") + ".csv") ==
        "mask,weight,variance\n"
        "000,0,0\n001,1,0\n010,1,0\n100,1,0\n011,2,0\n101,2,0\n110,2,0\n111,3,0.25\n");
  const json summary = json::parse(slurp(out("par3") + ".json"));
  CHECK(summary["q"].get<double>() == doctest::Approx(0.5));
  CHECK(summary["total_variance"].get<double>() == doctest::Approx(0.25));
  CHECK(summary["level_masses"][3].get<double>() == doctest::Approx(0.25));

  REQUIRE(run_cli("spectrum --builtin dictator --n 5 --out " + out("dict5")) == 0);
  std::istringstream csv(slurp(out("dict5") + ".csv"));
  std::string line;
  std::getline(csv, line);  // header
  int nonzero = 0;
  while (std::getline(csv, line)) {
    if (line.substr(line.rfind(',') + 1) == "0") continue;
    ++nonzero;
    CHECK(line == "10000,1,0.25");
  }
  CHECK(nonzero == 1);
}

TEST_CASE("spectrum subcommand: tables and errors") {
  {
    std::ofstream t(out("and2.txt"));
    t << "n=2\n0\n0\n0\n1\n";
  }
  REQUIRE(run_cli("spectrum --table " + out("and2.txt") + " --out " + out("and2")) == 0);
  const std::string csv = slurp(out("and2") + ".csv");
  CHECK(csv.find("10,1,0.0625") != std::string::npos);
  CHECK(csv.find("11,2,0.0625") != std::string::npos);

  {
    std::ofstream t(out("bad.txt"));
    t << "n=2\n0\n1\nx\n0\n";
  }
  CHECK(run_cli("spectrum --table " + out("bad.txt") + " --out " + out("bad")) == 2);
  CHECK(run_cli("spectrum --builtin parity --n 18 --out " + out("big")) == 3);
  CHECK(run_cli("spectrum --out " + out("none")) == 2);  // no function source
}

TEST_CASE("bound subcommand: closed forms and verdicts") {
  REQUIRE(run_cli("bound --builtin-e dictator --builtin-f dictator --n 4 --eps 0.1 --out " +
                  out("dict.json")) == 0);
  const json r = json::parse(slurp(out("dict.json")));
  CHECK(r["lower"].get<double>() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r["upper"].get<double>() == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(r["disagreement"].get<double>() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r["sandwich"] == "pass");
  CHECK(r["method"] == "exact");

  REQUIRE(run_cli("bound --builtin-e parity --builtin-f parity --n 3 --eps 0.1 --out " +
                  out("par.json")) == 0);
  const json pr = json::parse(slurp(out("par.json")));
  CHECK(pr["disagreement"].get<double>() == doctest::Approx(0.244).epsilon(1e-12));
  CHECK(pr["lower"].get<double>() == doctest::Approx(0.244).epsilon(1e-12));
  CHECK(pr["sandwich"] == "pass");

  CHECK(run_cli("bound --builtin-e parity --builtin-f parity --n 3 --eps 0.7 --out " +
                out("bad.json")) == 2);
}

TEST_CASE("bound subcommand: spectra files and dimension mismatch") {
  REQUIRE(run_cli("spectrum --builtin parity --n 3 --out " + out("s3")) == 0);
  REQUIRE(run_cli("spectrum --builtin parity --n 4 --out " + out("s4")) == 0);
  REQUIRE(run_cli("bound --spectra " + out("s3") + ".csv " + out("s3") + ".csv" +
                  " --eps 0.1 --out " + out("ss.json")) == 0);
  const json r = json::parse(slurp(out("ss.json")));
  CHECK(r["method"] == "bounds-only");
  CHECK(r["lower"].get<double>() ==
        doctest::Approx((1.0 - std::pow(0.8, 3)) / 2).epsilon(1e-12));

  CHECK(run_cli("bound --spectra " + out("s3") + ".csv " + out("s4") + ".csv" +
                " --eps 0.1 --out " + out("mm.json")) == 4);
}

TEST_CASE("slcs dump-encoder reruns hash-equal") {
  const std::string flags = "slcs --n 4 --eps-typ 0.3 --seed 11 ";
  REQUIRE(run_cli(flags + "dump-encoder --out " + out("e1.txt")) == 0);
  REQUIRE(run_cli(flags + "dump-encoder --out " + out("e2.txt")) == 0);
  CHECK(slurp(out("e1.txt")) == slurp(out("e2.txt")));
  CHECK(run_cli("slcs --n 13 dump-encoder --out " + out("e13.txt")) == 3);
}

TEST_CASE("slcs marginal matches the library") {
  REQUIRE(run_cli("slcs --n 6 --eps-typ 0.3 marginal --m 6 --coord 1 --out " +
                  out("marg.csv")) == 0);
  depspec::SlcsConfig c = depspec::default_slcs_config(6);
  std::istringstream csv(slurp(out("marg.csv")));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "m,x,coordinate,p0,p1");
  int rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string m_s, x_s, coord_s, p0_s, p1_s;
    std::getline(row, m_s, ',');
    std::getline(row, x_s, ',');
    std::getline(row, coord_s, ',');
    std::getline(row, p0_s, ',');
    std::getline(row, p1_s, ',');
    std::uint32_t bits = 0;
    for (int j = 0; j < 6; ++j)
      if (x_s[static_cast<std::size_t>(j)] == '1') bits |= 1u << (5 - j);
    CHECK(std::stod(p1_s) ==
          doctest::Approx(depspec::single_letter_marginal(c, 6, bits, 1, 1)).epsilon(1e-9));
    CHECK(std::stod(p0_s) + std::stod(p1_s) == doctest::Approx(1.0).epsilon(1e-9));
    ++rows;
  }
  CHECK(rows > 0);
}

TEST_CASE("slcs check-props emits verdicts") {
  REQUIRE(run_cli("slcs --n 10 --eps-typ 0.1 --rate 0.8 --seed 3 check-props --draws 800"
                  " --out " +
                  out("props.json")) == 0);
  const json j = json::parse(slurp(out("props.json")));
  CHECK(j["pairwise_independence"]["verdict"] == "pass");
  CHECK(j["single_letter_trend"]["verdict"] == "pass");
  CHECK(j["permutation_invariance"]["verdict"] == "pass");
}

TEST_CASE("experiment subcommand: rows, manifests, determinism, exit codes") {
  CHECK(run_cli("experiment bogus --out-dir " + out("x")) == 2);

  const std::string common =
      " --n-grid 4,6 --draws 10 --master-seed 9 --out-dir ";
  REQUIRE(run_cli("experiment concentration --gamma-grid 0.02,0.05 --m-grid 1,2" + common +
                  out("exp1")) == 0);
  std::istringstream csv(slurp(out("exp1") + "/concentration.csv"));
  std::string line;
  int rows = -1;  // discount header
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 2 * 2 * 2);

  const json manifest = json::parse(slurp(out("exp1") + "/concentration_manifest.json"));
  CHECK(manifest["outputs"].size() == 1);
  CHECK(manifest["outputs"][0].get<std::string>().find("concentration.csv") !=
        std::string::npos);
  CHECK(manifest.contains("started_at"));
  // timestamps live in the manifest only
  CHECK(slurp(out("exp1") + "/concentration.csv").find(":") == std::string::npos);

  REQUIRE(run_cli("experiment collapse --eps-grid 0,0.1" + common + out("exp2")) == 0);
  REQUIRE(run_cli("experiment collapse --eps-grid 0,0.1" + common + out("exp3")) == 0);
  CHECK(slurp(out("exp2") + "/collapse.csv") == slurp(out("exp3") + "/collapse.csv"));

  REQUIRE(run_cli("experiment iccs --n-grid 4 --draws 5 --master-seed 9 --out-dir " +
                  out("exp4")) == 0);
  std::istringstream iccs(slurp(out("exp4") + "/iccs.csv"));
  std::getline(iccs, line);
  CHECK(line == "scheme,n,agreement_rate,agreement_stderr,hz_bound_bits,"
                "empirical_erasure_rate,draws,seed");
}

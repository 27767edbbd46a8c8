#include <doctest.h>

#include "wsn/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

using namespace wsn::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("wsn_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int call(std::vector<std::string> args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int rc = run(args, out, err);
  if (out_text) *out_text = out.str();
  return rc;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3) == "0.333333333333");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("sweep writes all figure files and echoes its config first") {
  const auto dir = scratch("sweep");
  std::string out;
  REQUIRE(call({"sweep", "--scenario", "chain3", "--rate-grid", "0.1:10:3", "--out", dir.string()}, &out) == kOk);
  CHECK(out.rfind("command=sweep\nscenario=chain3\n", 0) == 0);
  CHECK(out.find("alpha=0.4\n") != std::string::npos);
  for (const char* f : {"config.txt", "fig_U.csv", "fig_kbar.csv", "fig_mbar.csv", "fig_A.csv", "fig_A_states.csv"})
    CHECK(fs::exists(dir / f));
  CHECK(slurp(dir / "fig_A_states.csv").rfind("rate,A_000,A_100,A_010,A_001,A_101\n", 0) == 0);
  CHECK(slurp(dir / "fig_U.csv") == "rate,U\n0.1,72\n1,18\n10,12.6\n");
}

TEST_CASE("config file with flag precedence") {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# comment\nscenario = indep\nn = 4\nalpha = 0.3\n";
  }
  std::string out;
  REQUIRE(call({"sweep", "--config", (dir / "run.cfg").string(), "--alpha", "0.5", "--rate-grid",
                "1:1:1", "--out", dir.string()},
               &out) == kOk);
  CHECK(out.find("n=4\n") != std::string::npos);
  CHECK(out.find("alpha=0.5\n") != std::string::npos);
}

TEST_CASE("config errors exit 2") {
  CHECK(call({"sweep", "--alpha", "1.5"}) == kConfigError);
  CHECK(call({"sweep", "--scenario", "ring"}) == kConfigError);
  CHECK(call({"sweep", "--scenario", "custom"}) == kConfigError);
  CHECK(call({"sweep", "--scenario", "chain3", "--n", "4"}) == kConfigError);
  CHECK(call({"sweep", "--rate-grid", "1:2"}) == kConfigError);
  CHECK(call({"frontier", "--alphas", "0.2,1.3"}) == kConfigError);
  CHECK(call({"sweep", "--what"}) == kConfigError);
  CHECK(call({}) == kConfigError);
  CHECK(call({"--help"}) == kOk);
}

TEST_CASE("unwritable output exits 3") {
  const auto dir = scratch("io");
  fs::create_directories(dir);
  { std::ofstream(dir / "file") << "x"; }
  CHECK(call({"sweep", "--rate-grid", "1:1:1", "--out", (dir / "file" / "sub").string()}) == kIoError);
}

TEST_CASE("STL_OUT supplies the default directory") {
  const auto dir = scratch("env");
  ::setenv("STL_OUT", dir.string().c_str(), 1);
  CHECK(call({"sweep", "--rate-grid", "1:1:1"}) == kOk);
  ::unsetenv("STL_OUT");
  CHECK(fs::exists(dir / "fig_A.csv"));
}

TEST_CASE("custom layout scenario") {
  const auto dir = scratch("custom");
  fs::create_directories(dir);
  { std::ofstream(dir / "layout.csv") << "id,x,y\n1,0,0\n2,1,0\n3,1,1\n4,0,1\n"; }
  REQUIRE(call({"frontier", "--scenario", "custom", "--layout", (dir / "layout.csv").string(),
                "--decay", "exp:1", "--alphas", "0.2,0.4", "--rate-grid", "0.1:10:5", "--out", dir.string()}) == kOk);
  const auto csv = slurp(dir / "frontier.csv");
  CHECK(csv.rfind("alpha,rate,U,A,A_bayes,envelope\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 5);
}

TEST_CASE("optimize single beta") {
  const auto dir = scratch("opt");
  std::string out;
  REQUIRE(call({"optimize", "--beta", "0.999", "--rate-grid", "0.01:100:30", "--out", dir.string()}, &out) == kOk);
  CHECK(slurp(dir / "opt.csv").find(",false\n") != std::string::npos);
  CHECK(out.find("feasible=false") != std::string::npos);
}

TEST_CASE("validate fails on a tiny horizon and names the check") {
  const auto dir = scratch("validate");
  std::string out;
  CHECK(call({"validate", "--events", "100", "--trials", "200", "--replications", "20", "--out", dir.string()}, &out) ==
        kValidationFailed);
  CHECK(out.find("FAIL occupancy_tv_") != std::string::npos);
  CHECK(slurp(dir / "report.json").find("\"passed\": false") != std::string::npos);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

std::string cli_path() {
  const char* env = std::getenv("NHQM_CLI");
  return env ? env : "./nhqm";
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("spectrum of the oscillator in its own basis") {
  RunResult r = run("spectrum --model harmonic --basis 16 --count 6");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["model"]["name"] == "harmonic");
  CHECK(j["representation"]["kind"] == "basis");
  REQUIRE(j["eigenvalues"].size() == 6);
  for (int k = 0; k < 6; ++k) {
    CHECK(j["eigenvalues"][k]["real_flag"] == true);
    CHECK(std::abs(j["eigenvalues"][k]["re"].get<double>() - (2 * k + 1)) <= 1e-8);
    CHECK(std::abs(j["eigenvalues"][k]["im"].get<double>()) <= 1e-10);
  }
  CHECK(j["realness_summary"]["count_real"] == 6);
  CHECK(j["realness_summary"]["count_complex"] == 0);
  CHECK(j["ill_conditioned"] == false);
}

TEST_CASE("reruns are byte-identical") {
  const std::string cmd = "spectrum --model paper-example --grid 10:150 --count 5";
  RunResult a = run(cmd);
  RunResult b = run(cmd);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(!a.out.empty());
}

TEST_CASE("sweep CSV output") {
  RunResult r = run("sweep --nu 0:0.5:0.5 --basis 32 --count 3");
  REQUIRE(r.exit_code == 0);
  CHECK(first_line(r.out) == "nu,index,re,im,real_flag");
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find("true") != std::string::npos);
  }
  CHECK(rows == 6);  // two nu points, three rows each
  // the nu = 0 ground level is 1 to high accuracy
  CHECK(r.out.find("\n0,0,1,0,true\n") != std::string::npos);
}

TEST_CASE("evolve CSV output and norm columns") {
  RunResult r = run("evolve --model harmonic --basis 16 --tmax 1 --steps 10 --metric flat");
  REQUIRE(r.exit_code == 0);
  CHECK(first_line(r.out) == "t,l2_norm,h_norm");
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    if (rows == 0) CHECK(line.rfind("0,", 0) == 0);
    ++rows;
  }
  CHECK(rows == 11);

  // json summary format
  RunResult js = run(
      "evolve --model harmonic --basis 16 --tmax 1 --steps 10 --metric flat --format json");
  REQUIRE(js.exit_code == 0);
  json j = json::parse(js.out);
  CHECK(j["complex_spectrum"] == false);
  CHECK(j["h_norm_relative_drift"].get<double>() <= 1e-8);
}

TEST_CASE("exit codes for bad invocations") {
  CHECK(run("spectrum --model nosuch").exit_code == 2);
  CHECK(run("spectrum").exit_code == 2);
  CHECK(run("spectrum --model harmonic --grid 10:50 --basis 16").exit_code == 2);
  CHECK(run("spectrum --model harmonic --expr \"p^2\"").exit_code == 2);
  CHECK(run("sweep --nu 1:0:0.5").exit_code == 2);
  CHECK(run("sweep --nu oops").exit_code == 2);
  CHECK(run("spectrum --model harmonic --no-such-flag").exit_code == 2);
  // singular coefficient in a basis representation
  CHECK(run("spectrum --expr \"p^2 + 1/x^2\" --basis 16").exit_code == 2);
  // expression parse error
  CHECK(run("spectrum --expr \"p^3\"").exit_code == 2);
}

TEST_CASE("config file seeds defaults, flags override") {
  std::string path = "/tmp/nhqm_test_config.ini";
  {
    std::ofstream cfg(path);
    cfg << "[model]\nname = harmonic\n\n[representation]\nbasis = 16\n\n"
           "[task]\ncount = 4\n\n[output]\nprecision = 6\n";
  }
  RunResult r = run("spectrum --config " + path);
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  CHECK(j["model"]["name"] == "harmonic");
  CHECK(j["eigenvalues"].size() == 4);

  RunResult o = run("spectrum --config " + path + " --count 2");
  REQUIRE(o.exit_code == 0);
  CHECK(json::parse(o.out)["eigenvalues"].size() == 2);

  CHECK(run("spectrum --config /tmp/nhqm_no_such_file.ini").exit_code == 2);
  std::remove(path.c_str());
}

TEST_CASE("output goes to a file when requested") {
  std::string path = "/tmp/nhqm_test_out.json";
  RunResult r = run("spectrum --model harmonic --basis 16 --count 2 --output " + path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  REQUIRE(in.good());
  json j = json::parse(in);
  CHECK(j["eigenvalues"].size() == 2);
  std::remove(path.c_str());
}

TEST_CASE("precision flag controls printed digits") {
  RunResult r = run("spectrum --model paper-example --grid 10:100 --count 1 --precision 3");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.out);
  double e0 = j["eigenvalues"][0]["re"].get<double>();
  // the coarse-grid ground level 1.0287... rounds to three significant digits
  CHECK(e0 == doctest::Approx(1.03).epsilon(1e-12));
}

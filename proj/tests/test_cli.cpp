#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the tool with stderr discarded and returns its exit code and stdout.
Run run(const std::string& args) {
  const std::string cmd = std::string(HEISDISTORT_BIN) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "heisdistort_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").code == 2);
  CHECK(run("nosuch").code == 2);
  CHECK(run("axioms --bogus 1").code == 2);
  CHECK(run("axioms --trials notanumber").code == 2);
  CHECK(run("axioms --format xml").code == 2);
  CHECK(run("--help").code == 0);
  CHECK(run("distort --help").code == 0);
}

TEST_CASE("domain errors exit with 2") {
  CHECK(run("distort --alpha 1.6 --depth 2 --cosets 1 --samples 64").code == 2);
  CHECK(run("beta --formula main --p 3").code == 2);
  CHECK(run("axioms --n 0").code == 2);
  CHECK(run("sobolev --p 4").code == 2);
}

TEST_CASE("axioms report and exit codes") {
  const auto ok = run("axioms --trials 2000 --seed 5");
  CHECK(ok.code == 0);
  const auto j = nlohmann::json::parse(ok.out);
  CHECK(j["pass"] == true);
  CHECK(j["seed"] == 5);
  CHECK(j["records"].size() == 7);
  CHECK_FALSE(j.contains("wall_time_s"));
  CHECK(run("axioms --trials 2000 --seed 5").out == ok.out);

  const auto bad = run("axioms --trials 2000 --corrupt-group-law");
  CHECK(bad.code == 1);
  CHECK(nlohmann::json::parse(bad.out).contains("counterexample"));

  const auto timed = run("axioms --trials 200 --timing");
  CHECK(nlohmann::json::parse(timed.out).contains("wall_time_s"));
}

TEST_CASE("beta writes csv by default") {
  const auto r = run("beta --formula fig2 --points 11");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("alpha,beta,series\n", 0) == 0);
  const auto js = run("beta --formula fig1 --points 11 --format json");
  CHECK(js.code == 0);
  CHECK(nlohmann::json::parse(js.out)["pass"] == true);
}

TEST_CASE("output files and csv records") {
  const auto path = scratch("tubes.csv");
  const auto r = run("tubes --trials 500 --format csv --out " + path.string());
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("trial,", 0) == 0);
}

TEST_CASE("config files") {
  const auto cfg = scratch("axioms.cfg");
  {
    std::ofstream o(cfg);
    o << "# axioms run\ntrials = 1500\nseed=9  # trailing comment\n\n";
  }
  const auto via_file = run("axioms --config " + cfg.string());
  const auto via_flags = run("axioms --trials 1500 --seed 9");
  CHECK(via_file.code == 0);
  CHECK(via_file.out == via_flags.out);

  // Explicit flags override the file.
  const auto over = run("axioms --config " + cfg.string() + " --seed 4");
  CHECK(nlohmann::json::parse(over.out)["seed"] == 4);

  const auto bad = scratch("bad.cfg");
  {
    std::ofstream o(bad);
    o << "depth=3\n";
  }
  CHECK(run("axioms --config " + bad.string()).code == 2);
  CHECK(run("axioms --config /nonexistent/file.cfg").code == 2);
}

TEST_CASE("saved maps") {
  const auto path = scratch("map.bin");
  fs::remove(path);
  CHECK(run("sobolev --depth 2 --samples 20000 --save-map " + path.string()).code == 0);
  CHECK(fs::exists(path));
  CHECK(fs::file_size(path) > 1000);
  CHECK(run("sobolev --depth 5 --samples 1000 --save-map " + path.string()).code == 2);
}

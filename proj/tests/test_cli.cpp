// SPDX-License-Identifier: Apache-2.0
#include "indc/cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = indc::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "indc_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("help and usage exit codes") {
  const auto none = run({});
  CHECK(none.code == indc::cli::exit_usage);
  CHECK(none.err.find("Subcommands") != std::string::npos);
  CHECK(run({"--help"}).code == indc::cli::exit_ok);
  CHECK(run({"solve", "--help"}).code == indc::cli::exit_ok);
  CHECK(run({"frobnicate"}).code == indc::cli::exit_usage);
  CHECK(run({"solve", "--problem", "nope", "--scheme", "BE:M=1", "--steps", "2"}).code ==
        indc::cli::exit_usage);
  CHECK(run({"solve", "--problem", "vdp", "--scheme", "BE", "--steps", "2"}).code ==
        indc::cli::exit_usage);
  CHECK(run({"solve", "--problem", "vdp", "--scheme", "BE:M=2", "--steps", "0"}).code ==
        indc::cli::exit_usage);
}

TEST_CASE("tableau listing, JSON and matrices") {
  const auto list = run({"tableau"});
  CHECK(list.code == 0);
  CHECK(list.out.find("RadauIIA3") != std::string::npos);

  const auto j = run({"tableau", "--name", "radau3", "--json"});
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["s"] == 2);
  CHECK(doc["p"] == 3);
  CHECK(doc["q"] == 2);

  const auto dump = run({"tableau", "--name", "BE", "--dump-matrices", "--M", "2"});
  REQUIRE(dump.code == 0);
  CHECK(dump.out.rfind("matrix,row,col,value\n", 0) == 0);
  CHECK(dump.out.find("Pc,") != std::string::npos);
  CHECK(dump.out.find("Sc,") != std::string::npos);
}

TEST_CASE("solve prints final values and writes a trace") {
  const auto path = scratch_dir() / "trace.csv";
  const auto r = run({"solve", "--problem", "vdp", "--eps", "1e-3", "--scheme", "BE:M=2,K=1",
                      "--T", "0.1", "--steps", "2", "--trace", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("y(T)") != std::string::npos);
  const auto trace = slurp(path);
  CHECK(trace.rfind("step,node,t,y0,z0,loop\n", 0) == 0);
  // 2 steps x 2 loops x 3 nodes.
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 13);

  const auto j = run({"solve", "--problem", "scalar", "--scheme", "BE:M=1", "--steps", "4",
                      "--json"});
  REQUIRE(j.code == 0);
  CHECK(nlohmann::json::parse(j.out).contains("z"));
}

TEST_CASE("numerical failure exits with code 2 and a JSON error") {
  const auto r = run({"--json-errors", "solve", "--problem", "vdp", "--eps", "1e-6", "--scheme",
                      "DIRK2NSA:M=3,K=1", "--T", "0.5", "--steps", "5"});
  CHECK(r.code == indc::cli::exit_numerical);
  CHECK(r.err.find("warning") != std::string::npos);
  const auto line = r.err.substr(r.err.find('{'));
  const auto doc = nlohmann::json::parse(line);
  CHECK(doc["error"] == "numerical");
  CHECK(doc.contains("step"));
  CHECK(doc.contains("loop"));
}

TEST_CASE("converge writes the error table and a report") {
  const auto csv = scratch_dir() / "table.csv";
  const auto report = scratch_dir() / "report.json";
  const auto r = run({"converge", "--problem", "scalar", "--eps", "1e-6", "--scheme", "BE:M=1",
                      "--T", "0.5", "--H", "0.125", "--halvings", "3", "--out", csv.string(),
                      "--json", report.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# pass") != std::string::npos);
  CHECK(slurp(csv).rfind("H,err_y,err_z,ratio_y,ratio_z\n", 0) == 0);
  const auto doc = nlohmann::json::parse(slurp(report));
  CHECK(doc["rows"].size() == 4);
  CHECK(doc["pass"] == true);
}

TEST_CASE("compose and stability subcommands") {
  const auto c = run({"compose", "--M", "2", "--K", "1"});
  REQUIRE(c.code == 0);
  CHECK(nlohmann::json::parse(c.out)["s"] == 4);
  CHECK(run({"compose", "--M", "2", "--K", "0"}).code == indc::cli::exit_usage);

  const auto dir = scratch_dir();
  const auto s = run({"stability", "--scheme", "BE:M=2,K=1", "--res", "32", "--out",
                      (dir / "r.csv").string(), "--boundary", (dir / "b.csv").string(), "--svg",
                      (dir / "r.svg").string()});
  REQUIRE(s.code == 0);
  CHECK(s.out.find("A-stable (sampled): yes") != std::string::npos);
  CHECK(slurp(dir / "r.csv").rfind("re,im,absR\n", 0) == 0);
  CHECK(slurp(dir / "b.csv").rfind("polyline,re,im\n", 0) == 0);
  CHECK(slurp(dir / "r.svg").find("<svg") != std::string::npos);
  CHECK(run({"stability", "--scheme", "BE:M=2", "--window", "1,2,3"}).code ==
        indc::cli::exit_usage);
}

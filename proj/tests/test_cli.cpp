#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  static int counter = 0;
  const std::string tag = "/tmp/schlesinger_cli_" + std::to_string(++counter);
  const std::string out = tag + ".out", err = tag + ".err";
  const std::string cmd =
      std::string(CLI_PATH) + " " + args + " > " + out + " 2> " + err;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  std::remove(out.c_str());
  std::remove(err.c_str());
  return r;
}

// Normal-form instance with hand-checked entries; poles clear of {0, 1, 2}
// so --pin-012 keeps them distinct.
const char* kInstance = R"({
  "n": 3,
  "lambdas": [[-1.5, 0.0], [1.0, 0.0], [2.0, 0.0], [3.5, 0.0]],
  "matrices": [
    {"affine": [[0.0, 0.0], [6.0, 0.0], [1.0, 0.0]]},
    {"affine": [[1.0, 0.0], [-1.0, 0.0], [1.0, 0.0]]},
    {"affine": [[-2.0, 0.0], [0.0, 0.0], [1.0, 0.0]]},
    {"affine": [[1.0, 0.0], [-5.0, 0.0], [-3.0, 0.0]]}
  ],
  "roots": [[1.0, 0.0], [0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]
})";

std::string write_fixture(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/schlesinger_fixture_" + name;
  std::ofstream os(path, std::ios::binary);
  os << body;
  return path;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("").exit_code == 2);
  CHECK(run("frobnicate").exit_code == 2);
  CHECK(run("reduce").exit_code == 2);                     // missing -i
  CHECK(run("verify --samples 0").exit_code == 2);         // must be positive
  CHECK(run("flow -i /nonexistent.json --k 0").exit_code == 2);  // missing path
}

TEST_CASE("verify: deterministic passing report") {
  const RunResult r1 = run("verify --seed 5 --n 3 --samples 3");
  CHECK(r1.exit_code == 0);
  const json rep = json::parse(r1.out);
  CHECK(rep["pass"] == true);
  CHECK(rep["seed"] == 5);
  CHECK(rep["n_values"] == json::array({3}));
  CHECK(rep["properties"].size() > 10);

  const RunResult r2 = run("verify --seed 5 --n 3 --samples 3");
  CHECK(r2.out == r1.out);  // byte-identical stdout; timing goes to stderr
  CHECK(r1.out.find("wall") == std::string::npos);
}

TEST_CASE("reduce / lift round trip through files") {
  const std::string inst = write_fixture("inst.json", kInstance);
  const std::string red = "/tmp/schlesinger_fixture_red.json";
  const std::string lifted = "/tmp/schlesinger_fixture_lifted.json";

  const RunResult r = run("reduce -i " + inst + " -o " + red);
  CHECK(r.exit_code == 0);
  const json jr = json::parse(slurp(red));
  CHECK(jr["n"] == 3);
  CHECK(jr["factors"].size() == 1);
  CHECK(jr["casimirs"].size() == 4);
  CHECK(jr["chart"].contains("i"));
  CHECK(jr["chart"].contains("root0"));
  CHECK(jr["score"].get<double>() > 0.0);

  // Determinism of the written file.
  const std::string red2 = "/tmp/schlesinger_fixture_red2.json";
  run("reduce -i " + inst + " -o " + red2);
  CHECK(slurp(red2) == slurp(red));

  const RunResult l = run("lift -i " + red + " -o " + lifted);
  CHECK(l.exit_code == 0);
  const json jl = json::parse(slurp(lifted));
  CHECK(jl["n"] == 3);
  CHECK(jl["matrices"].size() == 4);
  CHECK(jl["roots"].size() == 4);
  CHECK(jl["lambdas"] == json::parse(kInstance)["lambdas"]);

  // Reducing the lifted instance again reproduces the reduced data.
  const std::string red3 = "/tmp/schlesinger_fixture_red3.json";
  const RunResult rr = run("reduce -i " + lifted + " -o " + red3);
  CHECK(rr.exit_code == 0);
  const json j3 = json::parse(slurp(red3));
  CHECK(j3["chart"]["i"] == jr["chart"]["i"]);
  CHECK(j3["chart"]["j"] == jr["chart"]["j"]);
  for (std::size_t f = 0; f < jr["factors"].size(); ++f) {
    if (!jr["factors"][f].contains("affine")) continue;
    for (int c = 0; c < 3; ++c) {
      for (int part = 0; part < 2; ++part) {
        const double a = jr["factors"][f]["affine"][c][part].get<double>();
        const double b = j3["factors"][f]["affine"][c][part].get<double>();
        CHECK(std::abs(a - b) < 1e-9);
      }
    }
  }

  std::remove(inst.c_str());
  std::remove(red.c_str());
  std::remove(red2.c_str());
  std::remove(red3.c_str());
  std::remove(lifted.c_str());
}

TEST_CASE("flow: csv to stdout, summary to stderr") {
  const std::string inst = write_fixture("flow.json", kInstance);
  const RunResult r =
      run("flow -i " + inst + " --k 0 --path \"-1.5+0.2i\" --checkpoints 2");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("t_re,t_im,", 0) == 0);
  int rows = 0;
  for (char ch : r.out) rows += ch == '\n';
  CHECK(rows == 4);  // header + initial + 2 checkpoints
  const json summary = json::parse(r.err);
  CHECK(summary["command"] == "flow");
  CHECK(summary["rows"] == 3);
  CHECK(summary["max_casimir_drift"].get<double>() < 1e-8);
  CHECK(summary["max_moment_residual"].get<double>() < 1e-9);

  // With --out the roles swap: summary on stdout, CSV in the file.
  const std::string csv = "/tmp/schlesinger_fixture_flow.csv";
  const RunResult r2 = run("flow -i " + inst + " --k 0 --path \"-1.5+0.2i\" " +
                           "--checkpoints 2 --out " + csv);
  CHECK(r2.exit_code == 0);
  CHECK(json::parse(r2.out)["command"] == "flow");
  CHECK(slurp(csv).rfind("t_re,t_im,", 0) == 0);
  std::remove(csv.c_str());

  // Pinning the poles relocates lambda_1..3 to 0, 1, 2.
  const RunResult r3 = run("flow -i " + inst +
                           " --k 0 --path \"-1.5+0.2i\" --checkpoints 1 " +
                           "--pin-012 --out " + csv);
  CHECK(r3.exit_code == 0);
  std::remove(csv.c_str());

  std::remove(inst.c_str());
}

TEST_CASE("flow: a path into a pole exits with code 3") {
  const std::string inst = write_fixture("pole.json", kInstance);
  const RunResult r = run("flow -i " + inst + " --k 0 --path \"1\"");
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("error") != std::string::npos);
  std::remove(inst.c_str());
}

TEST_CASE("malformed input exits with code 2") {
  const std::string bad = write_fixture("bad.json", "{ not json");
  CHECK(run("reduce -i " + bad).exit_code == 2);
  const std::string misshapen =
      write_fixture("misshapen.json", R"({"n": 3, "lambdas": []})");
  CHECK(run("reduce -i " + misshapen).exit_code == 2);
  std::remove(bad.c_str());
  std::remove(misshapen.c_str());
}

TEST_CASE("compare: agreement report on the fixture") {
  const std::string inst = write_fixture("cmp.json", kInstance);
  const RunResult r =
      run("compare -i " + inst + " --k 0 --path \"-1.5+0.15i\" --tol 1e-11");
  CHECK(r.exit_code == 0);
  const json rep = json::parse(r.out);
  CHECK(rep["command"] == "compare");
  CHECK(rep["checkpoints"].get<int>() >= 8);
  CHECK(rep["sup_distance"].get<double>() < 1e-6);
  CHECK(rep["invariant_mismatch"].get<double>() < 1e-6);
  std::remove(inst.c_str());
}

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

std::string cli_path() {
  const char* path = std::getenv("NETSEP_CLI");
  REQUIRE_MESSAGE(path != nullptr, "NETSEP_CLI must point at the CLI binary");
  return path;
}

RunResult run_cli(const std::string& args) {
  std::string command = "\"" + cli_path() + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  char buffer[4096];
  size_t n;
  while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) result.output.append(buffer, n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("netsep-cli-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path_, ec); }

  std::string file(const std::string& name, const std::string& content) const {
    fs::path p = path_ / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
  }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

const char* hub_4x3_json = R"({
  "S": 4, "D": 3,
  "edges": [[1,1],[1,2],[1,3],[1,4],[2,4],[3,4]],
  "messages": [[1,1],[1,2],[1,3],[1,4],[2,4],[3,4]]
})";

const char* waterfilling_json = R"({
  "S": 1, "D": 1,
  "edges": [[1,1]], "messages": [[1,1]],
  "channel": {"F": 2, "powers": [1.0],
              "gains": [{"rx": 1, "tx": 1, "carrier": 1, "re": 1.0},
                        {"rx": 1, "tx": 1, "carrier": 2, "re": 2.0}]}
})";

const char* sigma_instance_json = R"({
  "S": 2, "D": 3,
  "edges": [[1,1],[2,1],[2,2],[3,2]],
  "messages": [[1,1],[2,1],[2,2],[3,2]],
  "channel": {"F": 2, "powers": [1, 1],
              "gains": [{"rx": 1, "tx": 1, "carrier": 1, "re": 1.0},
                        {"rx": 1, "tx": 1, "carrier": 2, "re": 1.0},
                        {"rx": 2, "tx": 1, "carrier": 1, "re": 1.0},
                        {"rx": 2, "tx": 1, "carrier": 2, "re": 1.0},
                        {"rx": 2, "tx": 2, "carrier": 1, "re": 1.0},
                        {"rx": 2, "tx": 2, "carrier": 2, "re": 1.0},
                        {"rx": 3, "tx": 2, "carrier": 1, "re": 1.0},
                        {"rx": 3, "tx": 2, "carrier": 2, "re": 1.0}]}
})";

ojson strip_duration(ojson report) {
  report.erase("duration_ms");
  return report;
}

}  // namespace

TEST_CASE("classify reports the hub labeling with exit 0") {
  TempDir dir;
  std::string input = dir.file("hub.json", hub_4x3_json);
  RunResult run = run_cli("classify --input \"" + input + "\"");
  REQUIRE(run.exit_code == 0);
  ojson report = ojson::parse(run.output);
  CHECK(report["command"] == "classify");
  CHECK(report["result"]["separable"] == true);
  CHECK(report["result"]["hub_source"] == 4);
  CHECK(report["result"]["hub_destination"] == 1);
  CHECK(report["network"]["S"] == 4);
}

TEST_CASE("missing input files exit 1") {
  RunResult run = run_cli("classify --input /nonexistent/never.json");
  CHECK(run.exit_code == 1);
}

TEST_CASE("invalid topologies exit 2") {
  TempDir dir;
  std::string input = dir.file(
      "broken.json", R"({"S":2,"D":2,"edges":[[1,1],[2,2]],"messages":[[1,1],[2,2]]})");
  RunResult run = run_cli("classify --input \"" + input + "\"");
  CHECK(run.exit_code == 2);
}

TEST_CASE("capacity on an inseparable instance exits 3 and carries the witness") {
  TempDir dir;
  std::string input = dir.file("sigma.json", sigma_instance_json);
  RunResult run = run_cli("capacity --input \"" + input + "\"");
  REQUIRE(run.exit_code == 3);
  ojson report = ojson::parse(run.output);
  CHECK(report["error"]["category"] == "inseparable");
  CHECK(report["result"]["separable"] == false);
  CHECK(report["result"]["witness"]["kind"] == "sigma");
  CHECK(report["result"]["witness"]["edges"].size() == 4);
}

TEST_CASE("a starved optimizer exits 4 but still reports its best iterate") {
  TempDir dir;
  std::string input = dir.file("wf.json", waterfilling_json);
  RunResult run = run_cli("capacity --input \"" + input + "\" --max-iter 1");
  REQUIRE(run.exit_code == 4);
  ojson report = ojson::parse(run.output);
  CHECK(report["error"]["category"] == "nonconvergence");
  CHECK(report["result"]["converged"] == false);
  CHECK(report["result"]["total"].get<double>() > 0.0);
}

TEST_CASE("allocate emits the water-filling split") {
  TempDir dir;
  std::string input = dir.file("wf.json", waterfilling_json);
  RunResult run = run_cli("allocate --input \"" + input + "\"");
  REQUIRE(run.exit_code == 0);
  ojson report = ojson::parse(run.output);
  CHECK(report["command"] == "allocate");
  double p1 = report["result"]["allocation"][0][0].get<double>();
  double p2 = report["result"]["allocation"][0][1].get<double>();
  CHECK(p1 == doctest::Approx(0.125).epsilon(1e-4));
  CHECK(p2 == doctest::Approx(0.875).epsilon(1e-4));
  CHECK(report["result"]["total"].get<double>() ==
        doctest::Approx(2.3398500028846243).epsilon(1e-8));
  CHECK(report["result"]["converged"] == true);
}

TEST_CASE("demo x produces the slope-4 gap table") {
  RunResult run = run_cli("demo x --pgrid 1e3:1e9:7");
  REQUIRE(run.exit_code == 0);
  ojson report = ojson::parse(run.output);
  CHECK(report["command"] == "demo");
  CHECK(report["result"]["separate_dof"] == 3.0);
  double slope = report["result"]["dof_fit"]["slope"].get<double>();
  CHECK(std::abs(slope - 4.0) < 0.05);
  CHECK(report["result"]["points"].size() == 7);
}

TEST_CASE("gap accepts a matching override instance file") {
  TempDir dir;
  std::string input = dir.file("sigma.json", sigma_instance_json);
  RunResult run = run_cli("gap --kind sigma --input \"" + input + "\" --pgrid 1e3:1e9:7");
  REQUIRE(run.exit_code == 0);
  ojson report = ojson::parse(run.output);
  double slope = report["result"]["dof_fit"]["slope"].get<double>();
  CHECK(std::abs(slope - 3.0) < 0.05);

  // Wrong kind for this file: the canonical topology check refuses.
  RunResult mismatch = run_cli("gap --kind x --input \"" + input + "\" --pgrid 1e3:1e9:7");
  CHECK(mismatch.exit_code == 1);
}

TEST_CASE("dof emits fit and samples") {
  RunResult run = run_cli("dof --kind rsigma --pgrid 1e3:1e9:7");
  REQUIRE(run.exit_code == 0);
  ojson report = ojson::parse(run.output);
  double slope = report["result"]["dof_fit"]["slope"].get<double>();
  CHECK(std::abs(slope - 3.0) < 0.05);
  CHECK(report["result"]["points"][0].contains("sum_rate"));
}

TEST_CASE("csv output has the documented columns") {
  RunResult run = run_cli("gap --kind x --format csv --pgrid 1e3:1e9:7");
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.rfind("P,joint_rate,separate_bound\n", 0) == 0);
  int lines = 0;
  for (char c : run.output)
    if (c == '\n') ++lines;
  CHECK(lines == 8);  // header + 7 grid rows
}

TEST_CASE("unknown kinds and bad grids exit 1") {
  CHECK(run_cli("demo zigzag").exit_code == 1);
  CHECK(run_cli("demo x --pgrid 9:1:3").exit_code == 1);
  CHECK(run_cli("gap --kind x --pgrid 1e3:1e4:3").exit_code == 1);  // span too small
}

TEST_CASE("reports are byte-identical across runs once duration is removed") {
  TempDir dir;
  std::string input = dir.file("wf.json", waterfilling_json);
  for (std::string args :
       {std::string("demo sigma --pgrid 1e3:1e9:7 --seed 5"),
        "capacity --input \"" + input + "\" --seed 5"}) {
    RunResult first = run_cli(args);
    RunResult second = run_cli(args);
    REQUIRE(first.exit_code == 0);
    REQUIRE(second.exit_code == 0);
    ojson a = strip_duration(ojson::parse(first.output));
    ojson b = strip_duration(ojson::parse(second.output));
    CHECK(a.dump() == b.dump());
    // The duration field is the only difference in the raw bytes.
    CHECK(a == b);
  }
}

TEST_CASE("--output writes the report to a file") {
  TempDir dir;
  std::string input = dir.file("hub.json", hub_4x3_json);
  std::string output = dir.file("report.json", "");
  RunResult run =
      run_cli("classify --input \"" + input + "\" --output \"" + output + "\"");
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.empty());
  std::ifstream in(output);
  ojson report = ojson::parse(in);
  CHECK(report["result"]["separable"] == true);
}

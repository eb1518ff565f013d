#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef SDFE_CLI_PATH
#define SDFE_CLI_PATH "sdfe"
#endif

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(SDFE_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buffer{};
  std::string output;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buffer.data(), buffer.size(), pipe) != nullptr)
    output += buffer.data();
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), output};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = std::string("/tmp/sdfe_test_") + name;
  std::ofstream out(path);
  out << text;
  return path;
}

const char* kVertical = R"({
  "goods": ["D", "U"],
  "firms": [
    {"name": "U", "output": "U", "inputs": {}, "f_L": 0, "kappa": 0},
    {"name": "D", "output": "D", "inputs": {"U": 1.0}, "f_L": 0, "kappa": 0}
  ],
  "consumer": {"goods": ["D", "U"], "A": [1, 1], "B_c": [[1, 0], [0, 1]]}
})";

const char* kCyclic = R"({
  "goods": ["a", "b"],
  "firms": [
    {"name": "fa", "output": "a", "inputs": {"b": 1.0}, "kappa": 1},
    {"name": "fb", "output": "b", "inputs": {"a": 1.0}, "kappa": 1}
  ],
  "consumer": {"goods": ["a", "b"], "A": [1, 1], "B_c": [[1, 0], [0, 1]]}
})";

}  // namespace

TEST_CASE("validate exit codes") {
  const std::string good = write_temp("vertical.json", kVertical);
  CHECK(run("validate " + good).exit_code == 0);

  const std::string bad = write_temp("cyclic.json", kCyclic);
  const RunResult cyclic = run("validate " + bad);
  CHECK(cyclic.exit_code == 1);
  CHECK(cyclic.output.find("viability failed") != std::string::npos);

  const std::string broken = write_temp("broken.json", "{nope");
  CHECK(run("validate " + broken).exit_code == 2);

  CHECK(run("validate /nonexistent/economy.json").exit_code == 2);
}

TEST_CASE("solve prints the paper prices") {
  const std::string path = write_temp("vertical.json", kVertical);
  const RunResult multi = run("solve " + path + " --regime multilateral");
  CHECK(multi.exit_code == 0);
  CHECK(multi.output.find("0.7928932") != std::string::npos);
  CHECK(multi.output.find("unique_certified=true") != std::string::npos);

  const RunResult uni = run("solve " + path + " --regime unilateral-inputs");
  CHECK(uni.exit_code == 0);
  CHECK(uni.output.find("D: 0.75") != std::string::npos);
}

TEST_CASE("output is deterministic and respects precision") {
  const std::string path = write_temp("vertical.json", kVertical);
  const RunResult first = run("solve " + path + " --format json");
  const RunResult second = run("solve " + path + " --format json");
  CHECK(first.output == second.output);

  const RunResult coarse = run("--precision 3 solve " + path);
  CHECK(coarse.exit_code == 0);
  CHECK(coarse.output.find("0.793") != std::string::npos);
  CHECK(coarse.output.find("0.7928932") == std::string::npos);
}

TEST_CASE("solver failure maps to exit 3") {
  const std::string path = write_temp("vertical.json", kVertical);
  const RunResult result = run("solve " + path + " --max-iter 2");
  CHECK(result.exit_code == 3);
}

TEST_CASE("unknown flags are rejected") {
  const std::string path = write_temp("vertical.json", kVertical);
  CHECK(run("solve " + path + " --what-is-this 1").exit_code == 2);
  CHECK(run("solve " + path + " --regime bogus").exit_code == 2);
}

TEST_CASE("chain subcommand flags equal profits") {
  const RunResult result =
      run("chain --layers 3 --firms 2,2,2 --k 1 --regime multilateral");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("equal profits across layers: yes") !=
        std::string::npos);
}

TEST_CASE("merger subcommand prints the disagreement interval") {
  const RunResult result = run("merger --k 1 --Bc 1 --n1-max 20");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("n_*") != std::string::npos);
  CHECK(result.output.find("disagreement interval") != std::string::npos);
}

TEST_CASE("sweep-depth emits a monotone ratio column") {
  const RunResult result = run("sweep-depth --N-max 5");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("N,Q_multi,Q_local,W_multi,W_local,Q_ratio") !=
        std::string::npos);
  // Parse the Q_ratio column and check monotonicity.
  std::vector<double> ratios;
  std::istringstream lines(result.output);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    size_t pos = 0;
    int field = 0;
    double ratio = 0.0;
    while (field < 5) {
      pos = line.find(',', pos) + 1;
      ++field;
    }
    ratio = std::stod(line.substr(pos));
    ratios.push_back(ratio);
  }
  REQUIRE(ratios.size() == 4);
  for (size_t i = 1; i < ratios.size(); ++i) CHECK(ratios[i] > ratios[i - 1]);
}

TEST_CASE("surplus subcommand reports orderings") {
  const RunResult result = run("surplus --layers 3 --firms 2 --k 1");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("equal across layers") != std::string::npos);
  CHECK(result.output.find("increasing upstream") != std::string::npos);
}

TEST_CASE("goods-network emits edges") {
  const std::string path = write_temp("vertical.json", kVertical);
  const RunResult result = run("goods-network " + path);
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("from,to,weight") != std::string::npos);
  CHECK(result.output.find("centrality_price") != std::string::npos);
}

TEST_CASE("solve-substitutes runs on a substitutes file") {
  const char* kSubs = R"({
    "goods": ["D", "U"],
    "firms": [
      {"name": "U", "output": "U", "inputs": {},
       "sigma": [], "omega": [], "alpha": 1.0},
      {"name": "D", "output": "D", "inputs": {"U": 1.0},
       "sigma": [[0.5]], "omega": [1.0], "alpha": 0.5}
    ],
    "consumer": {"goods": ["D", "U"], "A": [1, 1], "B_c": [[1, 0], [0, 1]]}
  })";
  const std::string path = write_temp("subs.json", kSubs);
  const RunResult result = run("solve-substitutes " + path);
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("maximal equilibrium") != std::string::npos);

  const std::string core = write_temp("vertical.json", kVertical);
  CHECK(run("solve-substitutes " + core).exit_code == 2);
}

TEST_CASE("parallel sweeps assemble deterministically") {
  const RunResult one = run("sweep-depth --N-max 8");
  const RunResult two = run("sweep-depth --N-max 8");
  CHECK(one.exit_code == 0);
  CHECK(one.output == two.output);
}

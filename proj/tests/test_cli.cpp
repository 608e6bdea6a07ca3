#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "wrg/io.hpp"
#include "wrg/regular_graph.hpp"

namespace {

const std::string kCli = WRG_CLI_PATH;

std::string temp_path(const std::string& name) { return ::testing::TempDir() + "wrg_cli_" + name; }

int run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_file(const std::string& name, const std::string& body) {
  const auto path = temp_path(name);
  std::ofstream(path) << body;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, SuccessfulSubcommands) {
  const auto graph = temp_path("g.txt");
  EXPECT_EQ(run_cli("gen --n 100 --d 3 --seed 4 --out " + graph), 0);
  // The header carries the derived graph-stream seed, which regenerates the graph.
  std::ostringstream expected;
  wrg::write_graph(expected, wrg::generate_regular(100, 3, wrg::derive_seed(4, wrg::stream::graph)));
  EXPECT_EQ(slurp(graph), expected.str());
  EXPECT_EQ(run_cli("gen --n 100 --d 3 --alpha 1.5 --seed 4 --out " + temp_path("net.txt")), 0);
  EXPECT_EQ(run_cli("eigen --in " + temp_path("net.txt") + " --format json"), 0);
  EXPECT_EQ(run_cli("variational --d 3 --L 3 --gamma 0.75"), 0);
  EXPECT_EQ(run_cli("tailbound --m 2 --L 10 --b 2"), 0);
  EXPECT_EQ(run_cli("decompose --n 1000 --d 3 --alpha 1 --b 1"), 0);
}

TEST(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(run_cli("--no-such-flag"), 2);
  EXPECT_EQ(run_cli("gen --n 5 --d 3"), 2);
  const auto unknown = write_file("unknown.json", R"({"kind": "census", "n": [100], "d": 3, "radiuss": 2})");
  EXPECT_EQ(run_cli("experiment --config " + unknown), 2);
  const auto gamma = write_file("gamma.json", R"({"kind": "variational", "d": 3, "gamma": [0.4], "L": [2]})");
  EXPECT_EQ(run_cli("experiment --config " + gamma), 2);
  EXPECT_EQ(run_cli("tailbound --m 2 --L 2 --b 2"), 2);
}

TEST(Cli, RuntimeErrorsExitThree) {
  EXPECT_EQ(run_cli("eigen --in /nonexistent/net.txt"), 3);
  EXPECT_EQ(run_cli("experiment --config /nonexistent/config.json"), 3);
}

TEST(Cli, ExperimentOutputDoesNotDependOnThreads) {
  const auto cfg = write_file("census.json", R"({"kind": "census", "n": [1000, 2000], "d": 3, "trials": 3})");
  const auto a = temp_path("a.csv"), b = temp_path("b.csv");
  ASSERT_EQ(run_cli("experiment --config " + cfg + " --threads 1 --out " + a), 0);
  ASSERT_EQ(run_cli("experiment --config " + cfg + " --threads 3 --out " + b), 0);
  EXPECT_FALSE(slurp(a).empty());
  EXPECT_EQ(slurp(a), slurp(b));
}

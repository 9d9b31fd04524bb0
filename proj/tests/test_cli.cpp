// Copyright 2026 The hsvirial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("hsvirial_cli_") + info->name() + "_" +
                                        std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static int exit_code(const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  int run(const std::string& args) const { return exit_code(std::string(HSVIRIAL_CLI) + " " + args); }
  int run_hooks(const std::string& args) const {
    return exit_code(std::string(HSVIRIAL_CLI_HOOKS) + " " + args);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  static std::vector<std::string> lines(const std::string& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
  }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  fs::path dir_;
};

TEST_F(Cli, SimulateHeadOn) {
  write("state.json", R"({"dim":2,"particles":[{"x":[0,0],"v":[1,0]},{"x":[3,0],"v":[-1,0]}]})");
  ASSERT_EQ(run("simulate --state " + path("state.json") + " --out " + path("t.ndjson")), 0);
  const auto ls = lines(path("t.ndjson"));
  ASSERT_EQ(ls.size(), 3u);
  const auto ev = json::parse(ls[1]);
  EXPECT_EQ(ev["type"], "event");
  EXPECT_EQ(ev["strength"].get<double>(), 2.0);
  EXPECT_EQ(ev["i"], 1);
  EXPECT_EQ(ev["j"], 2);
  const auto header = json::parse(ls[0]);
  EXPECT_EQ(header["config"]["mode"], "simulate");
  EXPECT_EQ(header["tool_version"], "0.1.0");
}

TEST_F(Cli, SimulateSingleSphere) {
  ASSERT_EQ(run("simulate --n 1 --t-end 3 --out " + path("t.ndjson")), 0);
  const auto ls = lines(path("t.ndjson"));
  ASSERT_EQ(ls.size(), 2u);
  const auto head = json::parse(ls[0]);
  const auto fin = json::parse(ls[1]);
  EXPECT_EQ(fin["events"], 0);
  const auto x0 = head["initial"][0]["x"];
  const auto v0 = head["initial"][0]["v"];
  const auto x1 = fin["state"][0]["x"];
  for (int k = 0; k < 2; ++k) {
    EXPECT_NEAR(x1[k].get<double>(), x0[k].get<double>() + 3.0 * v0[k].get<double>(), 1e-12);
  }
}

TEST_F(Cli, SimulateIsByteIdentical) {
  const std::string args = "simulate --n 20 --radius 8 --velocity-law isotropic-gaussian --seed 5";
  ASSERT_EQ(run(args + " --out " + path("a.ndjson")), 0);
  ASSERT_EQ(run(args + " --out " + path("b.ndjson")), 0);
  EXPECT_EQ(slurp(path("a.ndjson")), slurp(path("b.ndjson")));
  EXPECT_GT(lines(path("a.ndjson")).size(), 2u);
}

TEST_F(Cli, EnsembleIsByteIdentical) {
  const std::string args = "ensemble --n 10 --radius 8 --samples 200 --s-order 3";
  ASSERT_EQ(run(args + " --threads 1 --out " + path("a.json")), 0);
  ASSERT_EQ(run(args + " --threads 3 --out " + path("b.json")), 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("a.json.summary.csv")), slurp(path("b.json.summary.csv")));
  const auto rep = json::parse(slurp(path("a.json")));
  EXPECT_LT(rep["report"]["bound_ratio"].get<double>(), 1.0);
  EXPECT_EQ(rep["config"]["s_order"], 3);
  EXPECT_EQ(lines(path("a.json.summary.csv")).size(), 201u);
}

TEST_F(Cli, EnsembleFullOrderIsPlainMean) {
  ASSERT_EQ(run("ensemble --n 4 --radius 3 --samples 100 --s-order 4 --out " + path("r.json") +
                " --summary " + path("s.csv")),
            0);
  const auto rows = lines(path("s.csv"));
  double sum = 0.0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    std::stringstream row(rows[k]);
    std::string cell;
    for (int c = 0; c < 5; ++c) std::getline(row, cell, ',');
    sum += std::stod(cell);
  }
  const auto rep = json::parse(slurp(path("r.json")));
  EXPECT_NEAR(rep["report"]["lhs_estimate"].get<double>(), sum / 100.0, 1e-12 * (1.0 + sum));
}

TEST_F(Cli, EnsembleSingleSample) {
  ASSERT_EQ(run("ensemble --n 5 --samples 1 --out " + path("r.json")), 0);
  const auto rep = json::parse(slurp(path("r.json")));
  EXPECT_EQ(rep["report"]["lhs_stderr"], "n/a");
}

TEST_F(Cli, VerifyDefaultSuitePasses) {
  ASSERT_EQ(run("verify --samples 20 --out " + path("v.json")), 0);
  const auto rep = json::parse(slurp(path("v.json")));
  EXPECT_EQ(rep["report"]["trajectories"], 40);
  EXPECT_TRUE(rep["report"]["all_ok"].get<bool>());
}

TEST_F(Cli, VerifyCollisionFreeIsExact) {
  ASSERT_EQ(run("verify --samples 10 --sigma 0 --out " + path("v.json")), 0);
  const auto rep = json::parse(slurp(path("v.json")))["report"];
  EXPECT_EQ(rep["events"], 0);
  EXPECT_EQ(rep["identity"]["max_rel_residual"].get<double>(), 0.0);
  EXPECT_EQ(rep["inertia_lemma"]["min_slack"].get<double>(), 0.0);
}

TEST_F(Cli, VerifyRereadsTrajectory) {
  ASSERT_EQ(run("simulate --n 20 --radius 8 --seed 2 --out " + path("t.ndjson")), 0);
  EXPECT_EQ(run("verify --trajectory " + path("t.ndjson")), 0);
  write("junk.ndjson", "{\"type\":\"nonsense\"}\n");
  EXPECT_EQ(run("verify --trajectory " + path("junk.ndjson")), 1);
}

TEST_F(Cli, FaultInjectionIsDetected) {
  EXPECT_EQ(run_hooks("verify --samples 20 --velocity-law isotropic-gaussian --radius 8"), 0);
  EXPECT_EQ(run_hooks("verify --samples 20 --velocity-law isotropic-gaussian --radius 8 --fault-inject"),
            2);
  // release binary does not know the flag
  EXPECT_EQ(run("verify --samples 2 --fault-inject"), 1);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("simulate --dim 1"), 1);
  EXPECT_EQ(run("ensemble --n 5 --s-order 6"), 1);
  EXPECT_EQ(run("simulate --velocity-law maxwell"), 1);
  EXPECT_EQ(run("simulate --t-end 1 --until-dispersal"), 1);
  EXPECT_EQ(run("ensemble --n 20 --radius 2 --samples 2"), 4);
  write("triple.json",
        R"({"dim":2,"particles":[{"x":[-2,0],"v":[1,0]},{"x":[0,0],"v":[0,0]},{"x":[2,0],"v":[-1,0]}]})");
  EXPECT_EQ(run("simulate --state " + path("triple.json") + " --out " + path("o")), 3);
  write("cradle.json",
        R"({"dim":2,"particles":[{"x":[0,0],"v":[1,0]},{"x":[2,0],"v":[0,0]},{"x":[4,0],"v":[0,0]}]})");
  EXPECT_EQ(run("simulate --max-events 1 --state " + path("cradle.json") + " --out " + path("o")), 3);
  EXPECT_EQ(run("simulate --max-events 2 --state " + path("cradle.json") + " --out " + path("o")), 0);
  EXPECT_EQ(run("--version"), 0);
}

TEST_F(Cli, ConfigFilePrecedence) {
  write("run.ini", "n = 5\nseed = 3\nradius = 6\n");
  ASSERT_EQ(run("simulate --config " + path("run.ini") + " --seed 4 --out " + path("t.ndjson")), 0);
  const auto cfg = json::parse(lines(path("t.ndjson")).front())["config"];
  EXPECT_EQ(cfg["n"], 5);
  EXPECT_EQ(cfg["seed"], 4);
  EXPECT_EQ(cfg["radius"], 6.0);
  EXPECT_EQ(cfg["dim"], 2);
}

}  // namespace

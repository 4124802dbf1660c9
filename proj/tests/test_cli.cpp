// Copyright 2026 The beerlab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "beer/data.hpp"
#include "beer/diagnostics.hpp"

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into the captured text.
Outcome cli(const std::string& args) {
  const std::string command = std::string("\"") + BEER_CLI_PATH + "\" " + args + " 2>&1";
  Outcome result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), got);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("beer_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::string kQuadratic = std::string(BEER_CONFIG_DIR) + "/quadratic_ring.json";

TEST_F(CliTest, RunWritesCsvAndMetadata) {
  const Outcome r = cli("run --config " + kQuadratic + " --output " + path("q.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("rounds 500"), std::string::npos);
  std::ifstream csv(path("q.csv"));
  const auto rows = beer::read_csv(csv);
  EXPECT_EQ(rows.size(), 501u);
  EXPECT_LT(rows.back().grad_norm_sq, rows.front().grad_norm_sq);
  EXPECT_TRUE(fs::exists(path("q.csv.meta.json")));
}

TEST_F(CliTest, SeedOverrideChangesStochasticRuns) {
  const std::string cfg = write("s.json", R"({"algorithm": "beer", "topology": {"kind": "ring", "n": 4},
      "compressor": "randk:3", "objective": {"kind": "quadratic", "d": 8}, "rounds": 20, "seed": 1})");
  ASSERT_EQ(cli("run --config " + cfg + " --output " + path("a.csv")).code, 0);
  ASSERT_EQ(cli("run --config " + cfg + " --output " + path("b.csv")).code, 0);
  ASSERT_EQ(cli("run --config " + cfg + " --seed 2 --output " + path("c.csv")).code, 0);
  const auto slurp = [](const std::string& p) {
    std::ostringstream s;
    s << std::ifstream(p).rdbuf();
    return s.str();
  };
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_NE(slurp(path("a.csv")), slurp(path("c.csv")));
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  const std::string bad = write("bad.json", R"({"algorithm": "beer", "topology": {"kind": "ring", "n": 4},
      "compressor": "identity", "objective": {"kind": "quadratic"}, "rounds": 5, "seed": 1, "gamma": 2})");
  const Outcome r = cli("run --config " + bad + " --output " + path("x.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("gamma"), std::string::npos);

  const std::string no_output = write("no.json", R"({"algorithm": "beer", "topology": {"kind": "ring", "n": 4},
      "compressor": "identity", "objective": {"kind": "quadratic"}, "rounds": 5, "seed": 1})");
  EXPECT_EQ(cli("run --config " + no_output).code, 2);
  EXPECT_EQ(cli("run").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("spectral --kind grid --n 10").code, 2);
}

TEST_F(CliTest, DataErrorsExitThree) {
  const std::string data = write("bad.libsvm", "+1 1:1\n-1 3:1 2:1\n");
  const std::string cfg = write("d.json", R"({"algorithm": "beer", "topology": {"kind": "ring", "n": 2},
      "compressor": "identity", "objective": {"kind": "logistic"}, "data": {"path": ")" + data +
                                              R"("}, "rounds": 5, "seed": 1})");
  const Outcome r = cli("run --config " + cfg + " --output " + path("x.csv"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("line 2"), std::string::npos);
}

TEST_F(CliTest, DivergenceExitsFour) {
  const std::string cfg = write("div.json", R"({"algorithm": "beer", "topology": {"kind": "ring", "n": 4},
      "compressor": "identity", "objective": {"kind": "quadratic"}, "rounds": 500, "eta": 100, "gamma": 1,
      "seed": 1})");
  EXPECT_EQ(cli("run --config " + cfg + " --output " + path("x.csv")).code, 4);
}

TEST_F(CliTest, Spectral) {
  const Outcome ring = cli("spectral --kind ring --n 4");
  ASSERT_EQ(ring.code, 0) << ring.out;
  EXPECT_NE(ring.out.find("rho 0.666666666666666"), std::string::npos);
  const Outcome from_config = cli("spectral --config " + kQuadratic);
  EXPECT_EQ(from_config.out, ring.out);
  const Outcome complete = cli("spectral --kind complete --n 10");
  const std::size_t at = complete.out.find("\nrho ");
  ASSERT_NE(at, std::string::npos);
  EXPECT_NEAR(std::stod(complete.out.substr(at + 5)), 1.0, 1e-12);
}

TEST_F(CliTest, CheckConstants) {
  const Outcome found = cli("check-constants --C 4 --search");
  ASSERT_EQ(found.code, 0);
  EXPECT_NE(found.out.find("\nFEASIBLE"), std::string::npos);
  const Outcome bad = cli("check-constants --C 4 --c1 1 --c2 1 --c3 1 --c4 1 --c-gamma 1 --c-eta 1");
  ASSERT_EQ(bad.code, 0);
  EXPECT_NE(bad.out.find("INFEASIBLE"), std::string::npos);
}

TEST_F(CliTest, CompressBench) {
  const Outcome r = cli("compress-bench --compressor gsgd:5 --d 123 --trials 2000 --seed 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  EXPECT_EQ(cli("compress-bench --compressor topk:0 --d 10").code, 2);
}

TEST_F(CliTest, SynthData) {
  ASSERT_EQ(cli("synth-data --samples 50 --seed 4 --output " + path("s.libsvm")).code, 0);
  const beer::Dataset d = beer::load_libsvm(path("s.libsvm"));
  EXPECT_EQ(d.size(), 50u);
  EXPECT_EQ(cli("synth-data --samples 50 --output /nonexistent/dir/s.libsvm").code, 3);
}

}  // namespace

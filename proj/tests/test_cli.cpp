#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "psyn/io.hpp"
#include "psyn/privacy.hpp"
#include "test_helpers.hpp"

using namespace psyn;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out, err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("psyn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  CliResult run(const std::string& args) const {
    const std::string out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = std::string(PSYN_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
  }

  std::string write_dataset(const std::string& name, const Dataset& x) const {
    emit(path(name), BitTable{{}, x});
    return path(name);
  }

  nlohmann::json report(const std::string& name) const { return nlohmann::json::parse(read_file(path(name))); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, MissingInputPrintsUsage) {
  const CliResult r = run("generate --m 100 --k 5 --seed 1 --output " + path("y.csv"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--input"), std::string::npos);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST_F(CliTest, MissingSeedIsUsageError) {
  const auto x = write_dataset("x.csv", test::random_dataset(4, 50, 1));
  EXPECT_EQ(run("generate -i " + x + " -o " + path("y.csv") + " --m 100 --k 5").code, 1);
}

TEST_F(CliTest, KAndEpsilonAreExclusive) {
  const auto x = write_dataset("x.csv", test::random_dataset(4, 50, 1));
  EXPECT_EQ(run("generate -i " + x + " -o " + path("y.csv") + " --m 100 --k 5 --epsilon 1 --seed 1").code, 1);
}

TEST_F(CliTest, SmallMNamesTheBound) {
  const auto x = write_dataset("x.csv", test::random_dataset(6, 50, 1));
  const CliResult r = run("generate -i " + x + " -o " + path("y.csv") + " --m 10 --k 5 --seed 1 --report " +
                    path("r.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("C(p,<=d) = 22"), std::string::npos);
  EXPECT_EQ(report("r.json")["status"], "error");
  EXPECT_EQ(report("r.json")["error"]["class"], "config_error");
}

TEST_F(CliTest, ParseErrorIsReported) {
  write_file(path("bad.csv"), "1,0\n0,1,1\n");
  const CliResult r = run("generate -i " + path("bad.csv") + " -o " + path("y.csv") + " --m 10 --k 5 --seed 1");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, GenerateEndToEnd) {
  const Dataset xd = test::random_dataset(8, 20000, 3);
  const auto x = write_dataset("x.csv", xd);
  const CliResult r = run("generate -i " + x + " -o " + path("y.csv") +
                    " --m 4096 --k 2000 --seed 9 --accuracy --report " + path("r.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto y = ingest(path("y.csv")).rows;
  EXPECT_EQ(y.size(), 2000U);
  const auto doc = report("r.json");
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_EQ(doc["run"]["lambda"].get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(doc["run"]["epsilon_guaranteed"].get<double>(),
                   epsilon_for_k(2000, 20000, 4096, 8, 2, 0.05, 4.0));
  EXPECT_TRUE(doc["run"]["conditioning"]["passed"].get<bool>());
  EXPECT_LE(doc["accuracy"]["max_error"].get<double>(), 0.2);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  const auto x = write_dataset("x.csv", test::biased_dataset(6, 3000, 0.7, 5));
  const std::string common = "generate -i " + x + " --m 400 --k 500 --seed 77 --output-format ";
  ASSERT_EQ(run(common + "csv -o " + path("a.csv") + " --report " + path("a.json")).code, 0);
  ASSERT_EQ(run(common + "csv -o " + path("b.csv") + " --report " + path("b.json")).code, 0);
  EXPECT_EQ(read_file(path("a.csv")), read_file(path("b.csv")));
  auto a = report("a.json"), b = report("b.json");
  a["run"].erase("timings");
  b["run"].erase("timings");
  a["output"].erase("path");
  b["output"].erase("path");
  EXPECT_EQ(a.dump(), b.dump());
  ASSERT_EQ(run(common + "packed -o " + path("c.bin")).code, 0);
  EXPECT_EQ(ingest(path("c.bin")).rows, ingest(path("a.csv")).rows);
}

TEST_F(CliTest, CalibrateRecommendsM) {
  const CliResult r = run("calibrate --p 6 --degree 1 --gamma 0.5 --report " + path("r.json"));
  ASSERT_EQ(r.code, 0);
  const auto doc = report("r.json");
  EXPECT_EQ(doc["m_conditioning"], 3311);  // ceil(448 e^2) = ceil(3310.297...)
  EXPECT_EQ(doc["C"], 7);
}

TEST_F(CliTest, CalibratePrivacyFigures) {
  const CliResult r = run("calibrate --p 10 --degree 2 --n 100000000 --m 4096 --epsilon 1 --k 10 --report " +
                    path("r.json"));
  ASSERT_EQ(r.code, 0);
  const auto doc = report("r.json");
  EXPECT_EQ(doc["privacy"]["auto_k"], 0);
  EXPECT_NEAR(doc["privacy"]["epsilon_for_k"].get<double>(), 15410.666401947469, 1e-8);
}

TEST_F(CliTest, EvaluateSelfHasZeroError) {
  const auto x = write_dataset("x.csv", test::random_dataset(5, 100, 2));
  const CliResult r = run("evaluate -i " + x + " -s " + x + " --report " + path("r.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(report("r.json")["accuracy"]["max_error"].get<double>(), 0.0);
}

TEST_F(CliTest, EvaluateL1NeedsSeed) {
  const auto x = write_dataset("x.csv", test::random_dataset(5, 100, 2));
  EXPECT_EQ(run("evaluate -i " + x + " -s " + x + " --l1-trials 10").code, 1);
  EXPECT_EQ(run("evaluate -i " + x + " -s " + x + " --l1-trials 10 --seed 3").code, 0);
}

TEST_F(CliTest, AuditIdenticalPair) {
  const auto x = write_dataset("x.csv", test::random_dataset(6, 500, 2));
  const CliResult r = run("audit -i " + x + " --neighbor " + x + " --m 300 --seed 4 --report " + path("r.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = report("r.json");
  EXPECT_EQ(doc["records"][0]["sup_distance"].get<double>(), 0.0);
  EXPECT_EQ(doc["records"][0]["relation"], "identical");
  EXPECT_EQ(doc["violations"], 0);
}

TEST_F(CliTest, AuditRandomNeighbours) {
  const auto x = write_dataset("x.csv", test::random_dataset(6, 2000, 2));
  const CliResult r = run("audit -i " + x + " --pairs 3 --m 300 --seed 4 --report " + path("r.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(report("r.json")["records"].size(), 3U);
}

TEST_F(CliTest, MatchWitnessAndNoWitness) {
  const auto x = write_dataset("x.csv", test::random_dataset(8, 20000, 3));
  EXPECT_EQ(run("match -i " + x + " --m 4096 --seed 2").code, 0);

  Dataset xs(3), ss(3);
  Rng rng(8);
  for (int i = 0; i < 40; ++i) {
    xs.push_back(CubePoint{1, rng.sign(), rng.sign()});
    ss.push_back(CubePoint{-1, rng.sign(), rng.sign()});
  }
  const auto xp = write_dataset("xs.csv", xs);
  const auto sp = write_dataset("ss.csv", ss);
  const CliResult r = run("match -i " + xp + " --slots " + sp + " --degree 1 --report " + path("r.json"));
  EXPECT_EQ(r.code, 5);
  EXPECT_EQ(report("r.json")["match"]["outcome"], "no_witness");
}

TEST_F(CliTest, ConditioningFailureExitCode) {
  // p = 2, d = 2, m = 4: a draw passes only when all four cube points appear.
  const auto x = write_dataset("x.csv", test::random_dataset(2, 50, 1));
  int failures = 0;
  for (int seed = 0; seed < 5; ++seed) {
    const CliResult r = run("generate -i " + x + " -o " + path("y.csv") + " --degree 2 --m 4 --k 5 --max-attempts 1 --seed " +
                      std::to_string(seed) + " --report " + path("r.json"));
    ASSERT_TRUE(r.code == 0 || r.code == 2) << r.err;
    if (r.code == 2) {
      ++failures;
      EXPECT_NE(r.err.find("Failure"), std::string::npos);
      EXPECT_EQ(report("r.json")["error"]["class"], "conditioning_failure");
    }
  }
  EXPECT_GT(failures, 0);
}

TEST_F(CliTest, IsaSelection) {
  const auto x = write_dataset("x.csv", test::random_dataset(5, 500, 2));
  const std::string args = " generate -i " + x + " --m 200 --k 100 --seed 5 -o ";
  ASSERT_EQ(run("--isa scalar" + args + path("s.csv")).code, 0);
  ASSERT_EQ(run(args + path("a.csv")).code, 0);
  EXPECT_EQ(run("--isa bogus" + args + path("b.csv")).code, 1);
}

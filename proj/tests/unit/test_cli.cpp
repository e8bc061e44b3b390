#include <gtest/gtest.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "cli_run.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("contexcert_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return "'" + (dir_ / name).string() + "'"; }
  CliResult run(const std::string& args, const std::string& env = "") { return run_cli(args, dir_, env); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerateAndTestChsh) {
  auto g = run("generate singlet --angles 0,pi/2,pi/4,3pi/4 --n 20000 --seed 5 --out " + path("d.csv"));
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_TRUE(fs::exists(dir_ / "d.scenario.json"));

  auto t = run("test chsh --data " + path("d.csv") + " --scenario " + path("d.scenario.json"));
  ASSERT_EQ(t.code, 0) << t.err;
  const auto j = nlohmann::json::parse(t.out);
  EXPECT_EQ(j.at("outcome"), "passed_contextuality_test");
  EXPECT_GT(j.at("statistic").get<double>(), 2.7);

  // without --scenario the scenario is inferred from the CSV
  auto inferred = run("test chsh --data " + path("d.csv"));
  ASSERT_EQ(inferred.code, 0) << inferred.err;
  EXPECT_EQ(inferred.out, t.out);

  auto text = run("--format text test chsh --data " + path("d.csv"));
  ASSERT_EQ(text.code, 0) << text.err;
  EXPECT_NE(text.out.find("outcome: passed_contextuality_test"), std::string::npos) << text.out;
}

TEST_F(Cli, VerdictsDoNotDriveExitCodes) {
  auto g = run("generate lhv --model constant --observables A1,A2,B1,B2 --settings A1+B1,A1+B2,A2+B1,A2+B2 --n 200 "
               "--seed 1 --out " + path("c.csv"));
  ASSERT_EQ(g.code, 0) << g.err;
  auto t = run("test chsh --data " + path("c.csv"));
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(nlohmann::json::parse(t.out).at("outcome"), "rejected_noncontextual");
}

TEST_F(Cli, SeedFromEnvironment) {
  auto a = run("generate singlet --angles 0,1,2,3 --n 50 --out " + path("a.csv"), "CONTEXCERT_SEED=42");
  ASSERT_EQ(a.code, 0) << a.err;
  auto b = run("generate singlet --angles 0,1,2,3 --n 50 --seed 42 --out " + path("b.csv"));
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));

  // generation refuses to guess a seed
  auto c = run("generate singlet --angles 0,1,2,3 --n 50 --out " + path("c.csv"), "env -u CONTEXCERT_SEED");
  EXPECT_EQ(c.code, 2);
  EXPECT_FALSE(fs::exists(dir_ / "c.csv"));
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("test nonsense --data x.csv").code, 2);
  EXPECT_EQ(run("generate singlet --angles 0,1,2 --n 5 --seed 1 --out " + path("x.csv")).code, 2);
  EXPECT_EQ(run("--version").code, 0);
}

TEST_F(Cli, OperationalFailures) {
  {
    std::ofstream(dir_ / "bad.csv") << "setting;outcomes\nA+B;1,2\n";
    std::ofstream(dir_ / "syntax.csv") << "setting;outcomes\nA+B;1;2\n";
  }
  auto bad = run("test chsh --data " + path("bad.csv"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("line 2"), std::string::npos) << bad.err;
  EXPECT_EQ(run("test chsh --data " + path("syntax.csv")).code, 1);
  EXPECT_EQ(run("full-suite --data " + path("syntax.csv")).code, 1);
  std::ofstream(dir_ / "bad.json") << "{";
  EXPECT_EQ(run("oracle --constraints " + path("bad.json")).code, 1);
}

TEST_F(Cli, UnsupportedTestExitsThree) {
  auto g = run("generate lhv --model coin --observables A1,B1,B2 --settings A1+B1,A1+B2 --n 100 --seed 3 --out " +
               path("two.csv"));
  ASSERT_EQ(g.code, 0) << g.err;
  auto t = run("test chsh --data " + path("two.csv"));
  EXPECT_EQ(t.code, 3);
  EXPECT_EQ(nlohmann::json::parse(t.out).at("reason"), "MissingSettings");

  // the suite records the skip and still completes
  auto s = run("full-suite --data " + path("two.csv") + " --out " + path("r.json"));
  ASSERT_EQ(s.code, 0) << s.err;
  const auto r = nlohmann::json::parse(slurp(dir_ / "r.json"));
  EXPECT_EQ(r.at("summary").at("tests").at("chsh"), "skipped");
  EXPECT_EQ(r.at("randomness").size(), 4u);
}

TEST_F(Cli, Oracle) {
  std::ofstream(dir_ / "sys.json") << R"({"variables":["X1","X2","X3"],"constraints":[
    {"support":["X1","X2"],"correlation":-1},{"support":["X2","X3"],"correlation":-1},
    {"support":["X1","X3"],"correlation":-1}]})";
  auto o = run("oracle --constraints " + path("sys.json"));
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = nlohmann::json::parse(o.out);
  EXPECT_EQ(j.at("status"), "infeasible");
  EXPECT_FALSE(j.at("certificate").is_null());
}

TEST_F(Cli, RandomnessOnStream) {
  {
    std::ofstream f(dir_ / "alt.txt");
    for (int i = 0; i < 1000; ++i) f << (i % 2) << "\n";
  }
  auto r = run("randomness --stream " + path("alt.txt") + " --selections prime,after:01,mod:2:0,coin");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("verdict"), "failed");
  EXPECT_EQ(j.at("selections").size(), 4u);
  EXPECT_EQ(j.at("selections")[2].at("max_deviation"), 0.5);
}

TEST_F(Cli, FullSuiteIsReproducible) {
  ASSERT_EQ(run("generate singlet --angles 0,pi/2,pi/4,3pi/4 --n 3000 --seed 8 --out " + path("d.csv")).code, 0);
  ASSERT_EQ(run("full-suite --data " + path("d.csv") + " --seed 3 --out " + path("r1.json")).code, 0);
  ASSERT_EQ(run("full-suite --data " + path("d.csv") + " --seed 3 --out " + path("r2.json")).code, 0);
  const auto r1 = slurp(dir_ / "r1.json");
  EXPECT_FALSE(r1.empty());
  EXPECT_EQ(r1, slurp(dir_ / "r2.json"));
  auto to_stdout = run("full-suite --data " + path("d.csv") + " --seed 3");
  EXPECT_EQ(to_stdout.out, r1);
}

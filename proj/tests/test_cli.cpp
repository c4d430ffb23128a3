#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <map>
#include <sstream>

#include "sdr/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "sdr_bench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = sdr::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sdr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("SDR_SEED");
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_csv(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

std::string synthetic_csv(int rows) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  std::ostringstream s;
  s << "id;a;b;c;d;target\n";
  for (int i = 0; i < rows; ++i) {
    const double a = n(rng), b = n(rng), c = n(rng), d = n(rng);
    s << i << ';' << a << ';' << b << ';' << c << ';' << d << ';' << (2 * a - b + 0.1 * n(rng)) << '\n';
  }
  return s.str();
}

}  // namespace

TEST_F(CliTest, OracleCheckPassesAndNegativeControlFails) {
  const CliResult ok = run({"oracle-check"});
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_NE(ok.out.find("all 12 oracles passed"), std::string::npos);
  const CliResult bad = run({"oracle-check", "--inject-failure"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("FAIL eig_reconstruction"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"simulate", "--methods", "", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"simulate", "--methods", "pca,unknown", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"simulate", "--trials", "0", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"simulate", "--spectrum", "medium", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"simulate", "--trials", "two", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"sweep-gamma", "--methods", "pca", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"sweep-gamma", "--gamma-grid", "-1", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"real-data", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, SimulateIsByteDeterministic) {
  const std::vector<std::string> base{"simulate", "--methods", "pca", "--trials", "1", "--seed", "7"};
  auto first = base;
  first.insert(first.end(), {"--out", (dir_ / "a").string()});
  auto second = base;
  second.insert(second.end(), {"--out", (dir_ / "b").string()});
  ASSERT_EQ(run(first).code, 0);
  ASSERT_EQ(run(second).code, 0);
  for (const char* f : {"report.csv", "report.json", "table.txt"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  // One row per method x setting: 12 settings by default.
  std::istringstream csv(slurp(dir_ / "a" / "report.csv"));
  int rows = 0;
  for (std::string l; std::getline(csv, l);) ++rows;
  EXPECT_EQ(rows, 13);
}

TEST_F(CliTest, SeedFallsBackToEnvironment) {
  const auto args = [&](const std::string& sub) {
    return std::vector<std::string>{"simulate", "--methods", "ols", "--trials", "1", "--spectrum",
                                    "fast", "--alignment", "well", "--ntrain", "150", "--out",
                                    (dir_ / sub).string()};
  };
  setenv("SDR_SEED", "7", 1);
  ASSERT_EQ(run(args("env")).code, 0);
  unsetenv("SDR_SEED");
  auto explicit_seed = args("flag");
  explicit_seed.insert(explicit_seed.end(), {"--seed", "7"});
  ASSERT_EQ(run(explicit_seed).code, 0);
  ASSERT_EQ(run(args("zero")).code, 0);
  EXPECT_EQ(slurp(dir_ / "env" / "report.json"), slurp(dir_ / "flag" / "report.json"));
  EXPECT_NE(slurp(dir_ / "zero" / "report.json"), slurp(dir_ / "flag" / "report.json"));
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  const fs::path cfg = dir_ / "cfg.json";
  std::ofstream(cfg) << R"({"methods": ["ols"], "trials": 2, "spectrum": "slow",
                           "alignment": "mis", "ntrain": 150, "seed": 3})";
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir_ / "c").string()}).code, 0);
  const std::string csv = slurp(dir_ / "c" / "report.csv");
  EXPECT_NE(csv.find("SLOW_DECAY,MISALIGNED,150,OLS,2,0"), std::string::npos);
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--trials", "1", "--out",
                 (dir_ / "d").string()})
                .code,
            0);
  EXPECT_NE(slurp(dir_ / "d" / "report.csv").find("SLOW_DECAY,MISALIGNED,150,OLS,1,0"),
            std::string::npos);
  std::ofstream(dir_ / "bad.json") << R"({"colour": 1})";
  EXPECT_EQ(run({"simulate", "--config", (dir_ / "bad.json").string()}).code, 2);
  std::ofstream(dir_ / "broken.json") << "{";
  EXPECT_EQ(run({"simulate", "--config", (dir_ / "broken.json").string()}).code, 2);
  EXPECT_EQ(run({"simulate", "--config", (dir_ / "missing.json").string()}).code, 2);
}

TEST_F(CliTest, SweepWritesGridRowsPerMethodAndCase) {
  const CliResult r = run({"sweep-gamma", "--trials", "1", "--spectrum", "fast", "--alignment", "well,mis",
                     "--ntrain", "150", "--gamma-grid", "0.01,1,100", "--methods", "lspca,pls_ext",
                     "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(dir_ / "sweep.csv"));
  std::map<std::string, int> counts;
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    const auto parts = line.substr(0, line.find(",", line.find(",", line.find(",", line.find(",") + 1) + 1) + 1));
    ++counts[parts];
  }
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [key, n] : counts) EXPECT_EQ(n, 3) << key;
  EXPECT_TRUE(fs::exists(dir_ / "sweep_references.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "sweep.json"));
}

TEST_F(CliTest, RealDataCurvesAndErrors) {
  const fs::path csv = write_csv("data.csv", synthetic_csv(200));
  const CliResult ok = run({"real-data", "--data", csv.string(), "--response", "target", "--delimiter", ";",
                      "--exclude", "id", "--methods", "ols,pca,pls_ext", "--k-max", "4", "--out",
                      (dir_ / "out").string()});
  ASSERT_EQ(ok.code, 0) << ok.err;
  std::istringstream curves(slurp(dir_ / "out" / "curves.csv"));
  std::string header;
  std::getline(curves, header);
  EXPECT_EQ(header, "method,K,train_mse,test_mse");
  int rows = 0;
  for (std::string l; std::getline(curves, l);) ++rows;
  EXPECT_EQ(rows, 12);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "spectrum.csv"));

  const CliResult missing = run({"real-data", "--data", csv.string(), "--response", "quality",
                           "--delimiter", ";", "--out", dir_.string()});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("quality"), std::string::npos);

  const fs::path bad = write_csv("bad.csv", "a,b,y\n1,2,3\n4,x,6\n7,8,9\n");
  const CliResult nonnumeric = run({"real-data", "--data", bad.string(), "--response", "y", "--out", dir_.string()});
  EXPECT_EQ(nonnumeric.code, 2);
  EXPECT_NE(nonnumeric.err.find("line 3, column 2"), std::string::npos);

  EXPECT_EQ(run({"real-data", "--data", csv.string(), "--response", "target", "--delimiter", ";",
                 "--exclude", "id", "--k-max", "9", "--out", dir_.string()})
                .code,
            2);
}

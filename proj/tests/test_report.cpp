#include <gtest/gtest.h>

#include <sstream>

#include "sdr/report.hpp"

using namespace sdr;

namespace {

BenchReport sample_bench() {
  BenchReport r;
  r.trials = 2;
  r.seed = 5;
  r.k_learn = 15;
  r.notes = {"note"};
  for (auto n : {150, 1500}) {
    SettingReport s{{SpectrumKind::FAST_DECAY, AlignmentKind::PARTIAL, n}, {}};
    for (const char* name : {"OLS", "PCA"}) {
      MethodSummary m;
      m.method = name;
      m.mean_train_mse = 0.125;
      m.mean_test_mse = 0.5;
      TrialRecord ok;
      ok.seed = 1;
      ok.train_mse = 0.125;
      ok.test_mse = 0.5;
      TrialRecord bad;
      bad.seed = 2;
      bad.error = "boom";
      m.trials = {ok, bad};
      m.failures = 1;
      s.methods.push_back(m);
    }
    r.settings.push_back(s);
  }
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(FormatNumber, Representation) {
  EXPECT_EQ(format_number(0.25), "0.25");
  EXPECT_EQ(format_number(1e-12), "1e-12");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(123456.789), "123456.789");
}

TEST(BenchCsv, GoldenSchemaAndOrder) {
  std::ostringstream out;
  write_bench_csv(out, sample_bench());
  const auto l = lines(out.str());
  ASSERT_EQ(l.size(), 5u);
  EXPECT_EQ(l[0], "spectrum,alignment,n_train,method,trials,failures,mean_train_mse,mean_test_mse");
  EXPECT_EQ(l[1], "FAST_DECAY,PARTIAL,150,OLS,2,1,0.125,0.5");
  EXPECT_EQ(l[2], "FAST_DECAY,PARTIAL,150,PCA,2,1,0.125,0.5");
  EXPECT_EQ(l[3], "FAST_DECAY,PARTIAL,1500,OLS,2,1,0.125,0.5");
}

TEST(BenchJson, CarriesPerTrialDetail) {
  const nlohmann::json j = to_json(sample_bench());
  EXPECT_EQ(j.at("trials"), 2);
  EXPECT_EQ(j.at("settings").size(), 2u);
  const auto& m = j.at("settings")[0].at("methods")[1];
  EXPECT_EQ(m.at("method"), "PCA");
  EXPECT_EQ(m.at("trials")[0].at("test_mse"), 0.5);
  EXPECT_EQ(m.at("trials")[1].at("error"), "boom");
  EXPECT_EQ(j.at("notes")[0], "note");
}

TEST(BenchTable, MethodsDownSettingsAcross) {
  std::ostringstream out;
  write_bench_table(out, sample_bench());
  const auto l = lines(out.str());
  ASSERT_EQ(l.size(), 4u);
  EXPECT_NE(l[1].find("FAST_DECAY/PARTIAL/N150"), std::string::npos);
  EXPECT_NE(l[1].find("FAST_DECAY/PARTIAL/N1500"), std::string::npos);
  EXPECT_EQ(l[2].rfind("OLS", 0), 0u);
  EXPECT_NE(l[2].find("0.125 / 0.500 (1 failed)"), std::string::npos);
}

TEST(SweepCsv, OneRowPerGridValue) {
  SweepReport r;
  r.grid = {Gamma::finite(0.5), Gamma::finite(2.0), Gamma::infinity()};
  SweepSetting s{{SpectrumKind::SLOW_DECAY, AlignmentKind::WELL_ALIGNED, 150}, {}, 3.0, 2.0};
  s.curves.push_back({"LSPCA", {1.0, 2.0, 3.0}, {0, 0, 1}});
  s.curves.push_back({"PLS_EXT", {1.5, 2.5, 3.5}, {0, 0, 0}});
  r.settings.push_back(s);
  std::ostringstream out;
  write_sweep_csv(out, r);
  const auto l = lines(out.str());
  ASSERT_EQ(l.size(), 7u);
  EXPECT_EQ(l[0], "spectrum,alignment,n_train,method,gamma,mean_test_mse,failures");
  EXPECT_EQ(l[3], "SLOW_DECAY,WELL_ALIGNED,150,LSPCA,inf,3,1");
  std::ostringstream refs;
  write_sweep_references_csv(refs, r);
  EXPECT_EQ(lines(refs.str())[1], "SLOW_DECAY,WELL_ALIGNED,150,3,2");
  EXPECT_EQ(to_json(r).at("grid")[2], "INFINITY");
}

TEST(CurveCsv, Columns) {
  RealDataReport r;
  r.curve = {{"PCA", 1, 0.5, 0.75, {}, {}, {}, {}}, {"PCA", 2, 0.25, 0.5, {}, {}, {}, {}}};
  r.spectrum = Eigen::Vector2d(2.0, 1.0);
  std::ostringstream out;
  write_curve_csv(out, r);
  const auto l = lines(out.str());
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "method,K,train_mse,test_mse");
  EXPECT_EQ(l[2], "PCA,2,0.25,0.5");
  std::ostringstream spec;
  write_spectrum_csv(spec, r);
  EXPECT_EQ(lines(spec.str())[0], "index,eigenvalue");
  EXPECT_EQ(lines(spec.str())[1], "1,2");
}

#include "pkm/bench.hpp"

#include <cmath>
#include <cstring>

#include <gtest/gtest.h>

namespace pkm {
namespace {

bool bit_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {3.318e-08, 2.176e-01, 3.676e-02, 0.0, -1.25,
                   0.1 + 0.2, 1e300, 4.9e-324}) {
    const std::string s = format_double(v);
    EXPECT_TRUE(bit_equal(std::stod(s), v)) << s;
  }
}

TEST(BenchCsv, HeaderAndRoundTrip) {
  std::vector<BenchRecord> records = {
      {240, 1, StepKind::kWrite, 3.318e-08, 1.035e-09, 9},
      {240, 2, StepKind::kRead, 2.176e-01, 3.913e-02, 9},
      {240, 12, StepKind::kWrite, 3.676e-02, 3.787e-03, 9},
  };
  const std::string csv = bench_records_to_csv(records);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "m,k,kind,mean_seconds,std_seconds,trials");
  std::vector<BenchRecord> parsed = bench_records_from_csv(csv);
  ASSERT_EQ(parsed.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(parsed[i].m, records[i].m);
    EXPECT_EQ(parsed[i].k, records[i].k);
    EXPECT_EQ(parsed[i].kind, records[i].kind);
    EXPECT_TRUE(bit_equal(parsed[i].mean_seconds, records[i].mean_seconds));
    EXPECT_TRUE(bit_equal(parsed[i].std_seconds, records[i].std_seconds));
    EXPECT_EQ(parsed[i].trials, records[i].trials);
  }
}

TEST(BenchCsv, RejectsBadHeader) {
  EXPECT_THROW(bench_records_from_csv("wrong,header\n1,2\n"), ConfigError);
}

// The published reference coefficients must survive serialization exactly.
TEST(ScalingFitJson, ReferenceFitRoundTripsBitExact) {
  ScalingFit fit;
  fit.a = 3.318e-08;
  fit.b = 2.176e-01;
  fit.c = 3.676e-02;
  fit.r_squared = 0.996;
  fit.k_opt = 24.0;
  ScalingFit parsed = scaling_fit_from_json(scaling_fit_to_json(fit));
  EXPECT_TRUE(bit_equal(parsed.a, fit.a));
  EXPECT_TRUE(bit_equal(parsed.b, fit.b));
  EXPECT_TRUE(bit_equal(parsed.c, fit.c));
  EXPECT_TRUE(bit_equal(parsed.r_squared, fit.r_squared));
  EXPECT_TRUE(bit_equal(parsed.k_opt, fit.k_opt));
}

TEST(FitScaling, ExactModelRecovery) {
  const double m = 24.0;
  std::vector<BenchRecord> records;
  for (int k : {1, 2, 3, 4, 6, 8, 12}) {
    BenchRecord r;
    r.m = 24;
    r.k = k;
    r.kind = StepKind::kWrite;
    r.mean_seconds = 0.01 + 0.001 * k + 0.2 * std::pow(m / k, 3.0);
    r.trials = 1;
    records.push_back(r);
  }
  ScalingFit fit = fit_scaling(records, m);
  EXPECT_NEAR(fit.c, 0.01, 1e-9);
  EXPECT_NEAR(fit.a, 0.001, 1e-9);
  EXPECT_NEAR(fit.b, 0.2, 1e-9);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  // Raw optimum (3*0.2*24^3/0.001)^(1/4) ≈ 53.7 exceeds m, so it clamps.
  EXPECT_DOUBLE_EQ(fit.k_opt, m);
}

TEST(KOptFormula, HandChecked) {
  EXPECT_NEAR(k_opt_formula(1.0, 1.0, 2.0), std::pow(24.0, 0.25), 1e-12);
  EXPECT_TRUE(std::isinf(k_opt_formula(0.0, 1.0, 2.0)));
  EXPECT_DOUBLE_EQ(k_opt_formula(1.0, 0.0, 2.0), 0.0);
}

TEST(FitScaling, ClampsNegativeCoefficients) {
  std::vector<BenchRecord> records;
  for (int k : {1, 2, 3, 4, 6}) {
    BenchRecord r;
    r.m = 12;
    r.k = k;
    r.kind = StepKind::kWrite;
    // Strongly negative slope in k; the fitted `a` would be negative.
    r.mean_seconds = 1.0 - 0.05 * k;
    r.trials = 1;
    records.push_back(r);
  }
  ScalingFit fit = fit_scaling(records, 12.0);
  EXPECT_GE(fit.a, 0.0);
  EXPECT_GE(fit.b, 0.0);
  EXPECT_GE(fit.c, 0.0);
}

TEST(FitScaling, NeedsFourDistinctK) {
  std::vector<BenchRecord> records;
  for (int k : {1, 2, 3}) {
    records.push_back({12, k, StepKind::kWrite, 0.1, 0.0, 1});
  }
  EXPECT_THROW(fit_scaling(records, 12.0), InsufficientData);
}

TEST(RunBench, RowCountAndValidation) {
  BenchConfig config;
  config.m = 8;
  config.code_size = 4;
  config.k_list = {1, 2};
  config.steps = {StepKind::kWrite, StepKind::kRead};
  config.trials = 2;
  config.steps_per_trial = 1;
  std::vector<BenchRecord> records = run_bench(config);
  EXPECT_EQ(records.size(), 4u);
  for (const BenchRecord& r : records) {
    EXPECT_GT(r.mean_seconds, 0.0);
    EXPECT_EQ(r.trials, 2);
  }
  config.k_list = {3};
  EXPECT_THROW(run_bench(config), ConfigError);
}

TEST(StepKind, StringRoundTrip) {
  EXPECT_EQ(to_string(StepKind::kWrite), "write");
  EXPECT_EQ(step_kind_from_string("read"), StepKind::kRead);
  EXPECT_THROW(step_kind_from_string("other"), ConfigError);
}

}  // namespace
}  // namespace pkm

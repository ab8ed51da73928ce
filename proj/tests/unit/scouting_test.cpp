#include <gtest/gtest.h>

#include <map>
#include <vector>

#include "rram/scouting.hpp"

namespace {

using namespace rram;

DeviceParams noiseless() {
  DeviceParams p;
  p.lrs_sigma = p.hrs_sigma = 0.0;
  p.relax_sigma_inf = p.relax_drift_mu = 0.0;
  p.read_noise_sigma = 0.0;
  p.endurance_widen_per_decade = 0.0;
  p.relax_tau = 1.0;
  return p;
}

OperandPattern bits(std::initializer_list<int> b) {
  OperandPattern p;
  for (int v : b) p.bits.push_back(static_cast<std::uint8_t>(v));
  return p;
}

TEST(Truth, DefinitionExamples) {
  EXPECT_FALSE(truth(LogicOp::NAND, bits({1, 1, 1, 1})));
  EXPECT_TRUE(truth(LogicOp::NOR, bits({0, 0})));
  EXPECT_FALSE(truth(LogicOp::NOR, bits({0, 1})));
  EXPECT_TRUE(truth(LogicOp::XOR, bits({1, 0, 0, 0})));
  EXPECT_FALSE(truth(LogicOp::XOR, bits({1, 1, 1, 1})));
  EXPECT_FALSE(truth(LogicOp::XOR, bits({0, 0, 0, 0})));
  // Complement of extremes, not parity.
  EXPECT_TRUE(truth(LogicOp::XOR, bits({1, 1, 0})));
}

TEST(Truth, MatchesBooleanDefinitionsExhaustively) {
  for (int n = 2; n <= 16; ++n) {
    for (std::uint32_t m = 0; m < (1u << n); ++m) {
      OperandPattern p;
      bool all_and = true, any_or = false;
      for (int i = 0; i < n; ++i) {
        const bool b = m >> i & 1;
        p.bits.push_back(b);
        all_and = all_and && b;
        any_or = any_or || b;
      }
      const bool nand = !all_and, nor = !any_or;
      ASSERT_EQ(truth(LogicOp::NAND, p), nand);
      ASSERT_EQ(truth(LogicOp::NOR, p), nor);
      ASSERT_EQ(truth(LogicOp::XOR, p), nand && !nor);
    }
  }
}

TEST(Classify, RegionExamples) {
  const ReferenceSet refs{4, 10.0, 20.0};
  EXPECT_TRUE(classify(LogicOp::NAND, 5, refs));
  EXPECT_TRUE(classify(LogicOp::NOR, 5, refs));
  EXPECT_FALSE(classify(LogicOp::XOR, 5, refs));
  EXPECT_TRUE(classify(LogicOp::NAND, 15, refs));
  EXPECT_FALSE(classify(LogicOp::NOR, 15, refs));
  EXPECT_TRUE(classify(LogicOp::XOR, 15, refs));
  EXPECT_FALSE(classify(LogicOp::NAND, 25, refs));
  EXPECT_FALSE(classify(LogicOp::NOR, 25, refs));
  EXPECT_FALSE(classify(LogicOp::XOR, 25, refs));
}

TEST(Classify, RegionsPartitionTheCurrentAxis) {
  Rng gen(4);
  for (int i = 0; i < 20000; ++i) {
    const double lo = 0.1 + 50 * gen.uniform();
    const ReferenceSet refs{4, lo, lo + 0.01 + 50 * gen.uniform()};
    const double x = 120 * gen.uniform() - 10;
    const bool nor = classify(LogicOp::NOR, x, refs);
    const bool xr = classify(LogicOp::XOR, x, refs);
    const bool not_nand = !classify(LogicOp::NAND, x, refs);
    ASSERT_EQ(nor + xr + not_nand, 1);
    if (not_nand) {
      ASSERT_FALSE(xr);
    }
  }
}

TEST(CalibrateReferences, SeparableZeroNoiseClasses) {
  const std::map<int, std::vector<double>> s{{0, {1.6}}, {1, {40.8}}, {2, {80.0}}};
  const auto cal = calibrate_references(s, 2);
  EXPECT_GT(cal.refs.i_ref_low, 1.6);
  EXPECT_LT(cal.refs.i_ref_low, 40.8);
  EXPECT_GT(cal.refs.i_ref_high, 40.8);
  EXPECT_LT(cal.refs.i_ref_high, 80.0);
  EXPECT_EQ(cal.low_errors, 0u);
  EXPECT_EQ(cal.high_errors, 0u);
}

TEST(CalibrateReferences, RequiresEdgeClasses) {
  const std::map<int, std::vector<double>> s{{0, {1.6}}, {1, {40.8}}, {3, {120}}, {4, {160}}};
  EXPECT_NO_THROW(calibrate_references(s, 4));
  auto missing = s;
  missing.erase(1);
  EXPECT_THROW(calibrate_references(missing, 4), std::invalid_argument);
  missing = s;
  missing[3].clear();
  EXPECT_THROW(calibrate_references(missing, 4), std::invalid_argument);
}

TEST(PatternSampling, PopcountIsExactAndPositionsUniform) {
  Rng rng(3);
  std::vector<int> hits(8, 0);
  for (int i = 0; i < 40000; ++i) {
    const auto p = pattern_with_popcount(8, 3, rng);
    ASSERT_EQ(p.popcount(), 3);
    for (int b = 0; b < 8; ++b) hits[b] += p.bits[b];
  }
  for (int h : hits) EXPECT_NEAR(h / 40000.0, 3.0 / 8.0, 0.01);
}

TEST(PatternSampling, PerClassCoversAllKEvenly) {
  Rng rng(5);
  std::vector<int> counts(17, 0);
  for (int i = 0; i < 34000; ++i) ++counts[sample_pattern(16, PatternSampling::PerClass, rng).popcount()];
  for (int c : counts) EXPECT_NEAR(c, 2000, 250);
}

TEST(SuccessRate, NoiselessIsPerfect) {
  ScoutingSetup s;
  s.params = noiseless();
  s.training_per_class = 5;
  for (int n : {2, 4, 8, 16})
    for (LogicOp op : {LogicOp::NAND, LogicOp::NOR, LogicOp::XOR}) {
      const auto r = success_rate(op, n, s, 300, 1);
      EXPECT_EQ(r.success.hits, r.success.total) << to_string(op) << " n=" << n;
    }
}

TEST(SuccessRate, FcSpSixteenInputNand) {
  ScoutingSetup s;
  const auto r = success_rate(LogicOp::NAND, 16, s, 10000, 2024);
  EXPECT_GE(r.success.fraction(), 0.98);
}

TEST(SuccessRate, WorkerCountDoesNotChangeTrials) {
  ScoutingSetup s;
  s.strategy = Strategy::RAW;
  s.training_per_class = 50;
  const auto a = success_rate(LogicOp::XOR, 8, s, 500, 9, 1);
  const auto b = success_rate(LogicOp::XOR, 8, s, 500, 9, 3);
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    ASSERT_EQ(a.trials[i].i_total, b.trials[i].i_total);
    ASSERT_EQ(a.trials[i].pattern.bits, b.trials[i].pattern.bits);
  }
  EXPECT_EQ(a.calibration.refs.i_ref_low, b.calibration.refs.i_ref_low);
}

TEST(Endurance, DecadeZeroEqualsPlainSuccessRate) {
  ScoutingSetup s;
  s.training_per_class = 200;
  const std::vector<int> decades{0, 3};
  const auto sweep = endurance_sweep(LogicOp::NAND, 4, s, decades, 2000, 5);
  const auto plain = success_rate(LogicOp::NAND, 4, s, 2000, 5);
  EXPECT_EQ(sweep[0].success.hits, plain.success.hits);
}

TEST(Endurance, StressWideningDegradesSuccess) {
  ScoutingSetup s;
  s.params.endurance_widen_per_decade = 0.5;
  s.training_per_class = 500;
  const std::vector<int> decades{0, 6};
  const auto sweep = endurance_sweep(LogicOp::XOR, 4, s, decades, 5000, 5);
  EXPECT_LT(sweep[1].success.fraction(), sweep[0].success.fraction() - 0.05);
}

TEST(Endurance, RejectsUnsortedDecades) {
  ScoutingSetup s;
  const std::vector<int> decades{2, 1};
  EXPECT_THROW(endurance_sweep(LogicOp::NAND, 4, s, decades, 10, 1), std::invalid_argument);
}

TEST(BinomialWeighting, Coefficients) {
  EXPECT_NEAR(binomial_coefficient(4, 2), 6.0, 1e-9);
  EXPECT_NEAR(binomial_coefficient(16, 8), 12870.0, 1e-6);
  std::vector<Proportion> perfect(5, Proportion{10, 10});
  EXPECT_NEAR(binomial_weighted_success(perfect, 4).first, 1.0, 1e-12);
}

}  // namespace

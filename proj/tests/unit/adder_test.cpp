#include <gtest/gtest.h>

#include <map>
#include <vector>

#include "rram/adder.hpp"

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

const LevelScheme kScheme = make_level_scheme(4, 25, 100, 5);

TEST(EncodeOperand, TableLookup) {
  EXPECT_DOUBLE_EQ(encode_operand(0, kScheme).center(), 25.0);
  EXPECT_DOUBLE_EQ(encode_operand(3, kScheme).center(), 100.0);
  for (int v = 1; v < 4; ++v)
    EXPECT_LT(encode_operand(v - 1, kScheme).g_max, encode_operand(v, kScheme).g_min);
  EXPECT_THROW(encode_operand(4, kScheme), std::out_of_range);
  EXPECT_THROW(encode_operand(-1, kScheme), std::out_of_range);
}

TEST(BuildDecoder, ZeroNoiseStateCurrentsGivePlateauMidpoints) {
  // Enumerate all 16 pairs: sum s lands at 20 + 10 s µA.
  std::map<int, std::vector<double>> samples;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      samples[a + b].push_back((kScheme.levels[a].center() + kScheme.levels[b].center()) * 0.4);
  for (int s = 0; s <= 6; ++s)
    for (double i : samples[s]) EXPECT_DOUBLE_EQ(i, 20.0 + 10.0 * s);
  const auto thr = build_decoder(samples, 2);
  const std::vector<double> expected{25, 35, 45, 55, 65, 75};
  ASSERT_EQ(thr.size(), expected.size());
  for (std::size_t i = 0; i < thr.size(); ++i) EXPECT_NEAR(thr[i], expected[i], 1e-9);
}

TEST(BuildDecoder, RequiresEveryState) {
  std::map<int, std::vector<double>> samples{{0, {20}}, {1, {30}}, {2, {40}}};
  EXPECT_THROW(build_decoder(samples, 2), std::invalid_argument);
}

TEST(Decode, MonotoneInCurrent) {
  const std::vector<double> thr{25, 35, 45, 55, 65, 75};
  int prev = 0;
  for (double i = 0; i < 100; i += 0.37) {
    const int d = decode(i, thr);
    ASSERT_GE(d, prev);
    prev = d;
  }
  EXPECT_EQ(decode(10, thr), 0);
  EXPECT_EQ(decode(70, thr), 5);
  EXPECT_EQ(decode(90, thr), 6);
}

AdderConfig exact_config(int n) {
  AdderConfig cfg{kScheme, n, {}};
  // Sum s reads 10 * (n + s) µA; thresholds sit halfway between states.
  for (int s = 0; s < max_sum(n); ++s) cfg.decode_thresholds.push_back(10.0 * (n + s) + 5.0);
  return cfg;
}

TEST(Add, ZeroNoiseExamples) {
  const DeviceParams p = noiseless();
  Rng rng(1);
  CrossbarArray array(1, 4, p);
  const std::vector<CellAddress> cells{{0, 0}, {0, 1}};
  const auto t = add(array, cells, std::vector<int>{2, 3}, exact_config(2), Strategy::FC_SP, p, rng);
  EXPECT_DOUBLE_EQ(t.i_total, 70.0);
  EXPECT_EQ(t.decoded_sum, 5);
  const auto z = add(array, cells, std::vector<int>{0, 0}, exact_config(2), Strategy::FC_SP, p, rng);
  EXPECT_EQ(z.decoded_sum, 0);
  const std::vector<CellAddress> three{{0, 0}, {0, 1}, {0, 2}};
  const auto top = add(array, three, std::vector<int>{3, 3, 3}, exact_config(3), Strategy::FC_SP, p, rng);
  EXPECT_EQ(top.decoded_sum, 9);
}

TEST(Add, ZeroNoiseIsExactForAllPairsAndTriples) {
  const DeviceParams p = noiseless();
  for (int n : {2, 3}) {
    const AdderConfig cfg = exact_config(n);
    std::vector<CellAddress> cells;
    for (int i = 0; i < n; ++i) cells.push_back({0, static_cast<std::size_t>(i)});
    int count = 0;
    for (int m = 0; m < (n == 2 ? 16 : 64); ++m) {
      std::vector<int> ops{m & 3, m >> 2 & 3};
      if (n == 3) ops.push_back(m >> 4 & 3);
      CrossbarArray array(1, 4, p);
      Rng rng(m);
      const auto t = add(array, cells, ops, cfg, Strategy::FC_SP, p, rng);
      ASSERT_EQ(t.decoded_sum, t.true_sum);
      ASSERT_FALSE(t.error());
      ++count;
    }
    EXPECT_EQ(count, n == 2 ? 16 : 64);
  }
}

TEST(Add, ZeroNoiseStateCurrentsFormArithmeticProgression) {
  const DeviceParams p = noiseless();
  AdderSetup s;
  s.params = p;
  s.training_per_state = 3;
  const auto samples = adder_training(s, 1);
  for (int sum = 0; sum <= 6; ++sum)
    for (double i : samples.at(sum)) EXPECT_NEAR(i, 20.0 + 10.0 * sum, 1e-9);
}

TEST(Add, RejectsBadCellLayouts) {
  const DeviceParams p = noiseless();
  Rng rng(1);
  CrossbarArray array(2, 4, p);
  const std::vector<int> ops{1, 2};
  const std::vector<CellAddress> split{{0, 0}, {1, 1}}, dup{{0, 1}, {0, 1}}, one{{0, 0}};
  EXPECT_THROW(add(array, split, ops, exact_config(2), Strategy::FC_SP, p, rng), std::invalid_argument);
  EXPECT_THROW(add(array, dup, ops, exact_config(2), Strategy::FC_SP, p, rng), std::invalid_argument);
  EXPECT_THROW(add(array, one, ops, exact_config(2), Strategy::FC_SP, p, rng), std::invalid_argument);
}

TEST(AdderConfig, ValidatesThresholds) {
  AdderConfig cfg = exact_config(2);
  EXPECT_NO_THROW(cfg.validate());
  cfg.decode_thresholds[2] = cfg.decode_thresholds[1];
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = exact_config(2);
  cfg.decode_thresholds.pop_back();
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = exact_config(3);
  cfg.n_inputs = 4;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(ErrorReport, ZeroNoiseTrialsHaveNoErrors) {
  AdderSetup s;
  s.params = noiseless();
  s.training_per_state = 5;
  const auto cfg = train_adder(s, 3);
  const auto trials = run_adder_trials(s, cfg, 500, 3);
  const auto r = error_report(trials, 2);
  EXPECT_EQ(r.overall.hits, 0u);
  EXPECT_EQ(r.non_adjacent.hits, 0u);
  for (const auto& pair : r.adjacent) EXPECT_EQ(pair.errors.hits, 0u);
  EXPECT_EQ(r.mean_abs_error, 0.0);
}

TEST(ErrorReport, CountsAdjacentAndNonAdjacent) {
  std::vector<AdderTrial> trials(4);
  trials[0] = {{0, 1}, 0, 1, 1, false};
  trials[1] = {{0, 1}, 0, 2, 1, false};  // adjacent (1,2)
  trials[2] = {{0, 0}, 0, 3, 0, false};  // non-adjacent
  trials[3] = {{1, 1}, 0, 2, 2, true};   // programming failure
  const auto r = error_report(trials, 2);
  EXPECT_EQ(r.overall.hits, 3u);
  EXPECT_EQ(r.non_adjacent.hits, 1u);
  EXPECT_EQ(r.programming_failures, 1u);
  EXPECT_EQ(r.adjacent[1].errors.hits, 1u);
  EXPECT_EQ(r.adjacent[1].errors.total, 3u);
  EXPECT_DOUBLE_EQ(r.mean_abs_error, 1.0);
  EXPECT_THROW(error_report(std::vector<AdderTrial>{}, 2), std::invalid_argument);
}

TEST(AdderCalibrated, AdjacencyDominates) {
  AdderSetup s;
  s.strategy = Strategy::PC_SP;
  s.t_read = 3600;
  const auto cfg = train_adder(s, 11);
  const auto r = error_report(run_adder_trials(s, cfg, 10000, 11), 2);
  const double adjacent_only = r.overall.fraction() - r.non_adjacent.fraction();
  EXPECT_LT(r.non_adjacent.fraction(), adjacent_only / 10.0);
}

}  // namespace

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rram/crossbar.hpp"
#include "rram/parallel.hpp"
#include "rram/programming.hpp"
#include "rram/rng.hpp"
#include "rram/stats.hpp"
#include "rram/threshold.hpp"

namespace rram {

// Multi-level in-memory adder: each 2-bit operand is stored as one of four
// linearly spaced conductance levels, n_inputs cells of one row are read
// together and the summed current is decoded into the arithmetic sum
// 0 .. 3*n_inputs.

inline constexpr int kOperandLevels = 4;

inline int max_sum(int n_inputs) { return (kOperandLevels - 1) * n_inputs; }

struct AdderConfig {
  LevelScheme scheme;
  int n_inputs = 2;
  /// thresholds[s] separates sum s from s+1; size max_sum(n_inputs).
  std::vector<double> decode_thresholds;

  void validate() const {
    if (n_inputs != 2 && n_inputs != 3)
      throw std::invalid_argument("adder: n_inputs must be 2 or 3");
    if (scheme.levels.size() != kOperandLevels)
      throw std::invalid_argument("adder: scheme needs 4 levels");
    if (decode_thresholds.size() != static_cast<std::size_t>(max_sum(n_inputs)))
      throw std::invalid_argument("adder: wrong threshold count");
    for (std::size_t i = 1; i < decode_thresholds.size(); ++i)
      if (!(decode_thresholds[i] > decode_thresholds[i - 1]))
        throw std::invalid_argument("adder: thresholds not increasing");
  }
};

struct CellAddress {
  std::size_t row = 0;
  std::size_t col = 0;
};

struct AdderTrial {
  std::vector<int> operands;
  double i_total = 0.0;
  int decoded_sum = 0;
  int true_sum = 0;
  bool programming_failed = false;

  bool error() const { return programming_failed || decoded_sum != true_sum; }
};

inline const TargetLevel& encode_operand(int value, const LevelScheme& scheme) {
  if (value < 0 || value >= kOperandLevels)
    throw std::out_of_range("encode_operand: value must be in 0..3");
  if (scheme.levels.size() != kOperandLevels)
    throw std::invalid_argument("encode_operand: scheme needs 4 levels");
  return scheme.levels[static_cast<std::size_t>(value)];
}

/// Number of thresholds at or below the current.
inline int decode(double i_total, std::span<const double> thresholds) {
  return static_cast<int>(
      std::upper_bound(thresholds.begin(), thresholds.end(), i_total) -
      thresholds.begin());
}

/// One minimum-error threshold per adjacent pair of sum states.
inline std::vector<double> build_decoder(
    const std::map<int, std::vector<double>>& samples, int n_inputs) {
  const int top = max_sum(n_inputs);
  for (int s = 0; s <= top; ++s) {
    auto it = samples.find(s);
    if (it == samples.end() || it->second.empty())
      throw std::invalid_argument("build_decoder: no samples for sum " +
                                  std::to_string(s));
  }
  std::vector<double> thr;
  for (int s = 0; s < top; ++s) {
    double t = fit_threshold(samples.at(s), samples.at(s + 1)).threshold;
    // Heavily overlapping classes can fit out of order; keep the decoder
    // monotone.
    if (!thr.empty() && !(t > thr.back()))
      t = std::nextafter(thr.back(), INFINITY);
    thr.push_back(t);
  }
  return thr;
}

/// Program the operands into `cells` (one row), wait t_read after the last
/// write, read them in parallel and decode.
inline AdderTrial add(CrossbarArray& array, std::span<const CellAddress> cells,
                      std::span<const int> operands, const AdderConfig& config,
                      Strategy strategy, const DeviceParams& p, Rng& rng,
                      const ProgramOptions& opts = {}, double t_read = 1.0) {
  if (operands.size() != static_cast<std::size_t>(config.n_inputs) ||
      cells.size() != operands.size())
    throw std::invalid_argument("add: operand count must equal n_inputs");
  AdderTrial trial;
  trial.operands.assign(operands.begin(), operands.end());
  SelectionMask mask{cells.front().row, {}};
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].row != mask.row)
      throw std::invalid_argument("add: operand cells must share one row");
    if (!mask.cols.insert(cells[i].col).second)
      throw std::invalid_argument("add: duplicate operand cell");
    const ProgramOutcome o =
        array.program_cell(cells[i].row, cells[i].col,
                           encode_operand(operands[i], config.scheme), strategy,
                           p, rng, opts);
    trial.programming_failed |= !o.converged;
    trial.true_sum += operands[i];
  }
  array.advance_clock(t_read);
  trial.i_total = array.read_parallel(mask, p, rng);
  trial.decoded_sum = decode(trial.i_total, config.decode_thresholds);
  return trial;
}

struct AdderSetup {
  DeviceParams params;
  Strategy strategy = Strategy::FC_SP;
  LevelScheme scheme = make_level_scheme(4, 25.0, 100.0, 5.0);
  int n_inputs = 2;
  ProgramOptions program;
  double t_read = 1.0;
  int training_per_state = 1000;
};

inline constexpr std::uint64_t kTagAdderTraining = 0x61646474;
inline constexpr std::uint64_t kTagAdderTrial = 0x61646472;

namespace detail {

inline AdderTrial adder_trial(const AdderSetup& s, const AdderConfig& cfg,
                              std::span<const int> operands, Rng& rng) {
  CrossbarArray array(32, 32, s.params);
  std::vector<CellAddress> cells;
  for (int i = 0; i < s.n_inputs; ++i)
    cells.push_back({0, static_cast<std::size_t>(i)});
  return add(array, cells, operands, cfg, s.strategy, s.params, rng, s.program,
             s.t_read);
}

inline std::vector<std::vector<int>> tuples_by_sum(int n_inputs, int sum) {
  std::vector<std::vector<int>> out;
  std::vector<int> t(n_inputs, 0);
  for (;;) {
    int acc = 0;
    for (int v : t) acc += v;
    if (acc == sum) out.push_back(t);
    int i = 0;
    while (i < n_inputs && ++t[i] == kOperandLevels) t[i++] = 0;
    if (i == n_inputs) break;
  }
  return out;
}

}  // namespace detail

/// Training currents per sum state; each sample uses an operand tuple drawn
/// uniformly among those with that sum.
inline std::map<int, std::vector<double>> adder_training(
    const AdderSetup& s, std::uint64_t seed, unsigned workers = 1) {
  const int top = max_sum(s.n_inputs);
  const auto per = static_cast<std::size_t>(std::max(1, s.training_per_state));
  AdderConfig probe{s.scheme, s.n_inputs, std::vector<double>(top, 0.0)};
  std::vector<std::vector<std::vector<int>>> tuples;
  for (int sum = 0; sum <= top; ++sum)
    tuples.push_back(detail::tuples_by_sum(s.n_inputs, sum));
  std::vector<double> flat((top + 1) * per);
  parallel_for(flat.size(), workers, [&](std::size_t i) {
    const auto sum = i / per;
    Rng rng = Rng::substream(
        seed, {kTagAdderTraining, static_cast<std::uint64_t>(s.n_inputs), sum,
               i % per});
    const auto& choices = tuples[sum];
    const auto& ops = choices[rng.below(choices.size())];
    flat[i] = detail::adder_trial(s, probe, ops, rng).i_total;
  });
  std::map<int, std::vector<double>> out;
  for (int sum = 0; sum <= top; ++sum)
    out[sum].assign(flat.begin() + sum * per, flat.begin() + (sum + 1) * per);
  return out;
}

inline AdderConfig train_adder(const AdderSetup& s, std::uint64_t seed,
                               unsigned workers = 1) {
  AdderConfig cfg{s.scheme, s.n_inputs,
                  build_decoder(adder_training(s, seed, workers), s.n_inputs)};
  cfg.validate();
  return cfg;
}

/// Trials with operands drawn uniformly from 0..3 each.
inline std::vector<AdderTrial> run_adder_trials(const AdderSetup& s,
                                                const AdderConfig& cfg,
                                                std::size_t trials,
                                                std::uint64_t seed,
                                                unsigned workers = 1) {
  cfg.validate();
  std::vector<AdderTrial> out(trials);
  parallel_for(trials, workers, [&](std::size_t i) {
    Rng rng = Rng::substream(
        seed, {kTagAdderTrial, static_cast<std::uint64_t>(s.n_inputs), i});
    std::vector<int> ops(s.n_inputs);
    for (auto& v : ops) v = static_cast<int>(rng.below(kOperandLevels));
    out[i] = detail::adder_trial(s, cfg, ops, rng);
  });
  return out;
}

struct PairError {
  int lower = 0;  // states (lower, lower + 1)
  Proportion errors;
};

struct ErrorReport {
  std::vector<PairError> adjacent;
  Proportion overall;       // decoded != true, or programming failed
  Proportion non_adjacent;  // |decoded - true| >= 2
  std::size_t programming_failures = 0;
  double mean_abs_error = 0.0;
};

inline ErrorReport error_report(std::span<const AdderTrial> trials,
                                int n_inputs) {
  if (trials.empty()) throw std::invalid_argument("error_report: no trials");
  const int top = max_sum(n_inputs);
  ErrorReport r;
  for (int s = 0; s < top; ++s) r.adjacent.push_back({s, {}});
  double abs_sum = 0.0;
  for (const auto& t : trials) {
    const int diff = std::abs(t.decoded_sum - t.true_sum);
    ++r.overall.total;
    ++r.non_adjacent.total;
    r.overall.hits += t.error();
    r.non_adjacent.hits += diff >= 2;
    r.programming_failures += t.programming_failed;
    abs_sum += diff;
    for (auto& pair : r.adjacent) {
      const int lo = pair.lower, hi = pair.lower + 1;
      if (t.true_sum != lo && t.true_sum != hi) continue;
      ++pair.errors.total;
      pair.errors.hits += t.decoded_sum == (t.true_sum == lo ? hi : lo);
    }
  }
  r.mean_abs_error = abs_sum / static_cast<double>(trials.size());
  return r;
}

}  // namespace rram

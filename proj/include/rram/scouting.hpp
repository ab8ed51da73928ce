#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rram/crossbar.hpp"
#include "rram/device.hpp"
#include "rram/parallel.hpp"
#include "rram/programming.hpp"
#include "rram/rng.hpp"
#include "rram/stats.hpp"
#include "rram/threshold.hpp"

namespace rram {

// n-operand Scouting Logic. Operands sit in one row; 1 = LRS, 0 = HRS.
//
// XOR here is the complement of the two extremes: it is 1 unless the
// operands are all 0 or all 1. For n > 2 this is NOT parity.

enum class LogicOp { NAND, NOR, XOR };

inline const char* to_string(LogicOp op) {
  switch (op) {
    case LogicOp::NAND: return "NAND";
    case LogicOp::NOR: return "NOR";
    case LogicOp::XOR: return "XOR";
  }
  return "?";
}

inline std::optional<LogicOp> parse_logic_op(std::string_view s) {
  if (s == "NAND") return LogicOp::NAND;
  if (s == "NOR") return LogicOp::NOR;
  if (s == "XOR") return LogicOp::XOR;
  return std::nullopt;
}

struct OperandPattern {
  std::vector<std::uint8_t> bits;

  int size() const { return static_cast<int>(bits.size()); }
  int popcount() const {
    return static_cast<int>(std::count(bits.begin(), bits.end(), 1));
  }
};

/// Reference truth from the popcount of the operands.
inline bool truth(LogicOp op, int n, int k) {
  switch (op) {
    case LogicOp::NAND: return k != n;
    case LogicOp::NOR: return k == 0;
    case LogicOp::XOR: return k != 0 && k != n;
  }
  return false;
}

inline bool truth(LogicOp op, const OperandPattern& pattern) {
  return truth(op, pattern.size(), pattern.popcount());
}

struct ReferenceSet {
  int n = 0;
  double i_ref_low = 0.0;
  double i_ref_high = 0.0;

  bool valid() const { return 0.0 < i_ref_low && i_ref_low < i_ref_high; }
};

inline bool classify(LogicOp op, double i_total, const ReferenceSet& refs) {
  switch (op) {
    case LogicOp::NAND: return i_total < refs.i_ref_high;
    case LogicOp::NOR: return i_total < refs.i_ref_low;
    case LogicOp::XOR:
      return refs.i_ref_low <= i_total && i_total < refs.i_ref_high;
  }
  return false;
}

struct ReferenceCalibration {
  ReferenceSet refs;
  std::size_t low_errors = 0;   // k=0 vs k>=1 training errors
  std::size_t high_errors = 0;  // k<=n-1 vs k=n training errors
};

/// Places i_ref_low between the all-HRS class and every other class and
/// i_ref_high between the all-LRS class and every other class, each at the
/// minimum-training-error midpoint.
inline ReferenceCalibration calibrate_references(
    const std::map<int, std::vector<double>>& samples, int n) {
  if (n < 2) throw std::invalid_argument("calibrate_references: n < 2");
  for (int k : {0, 1, n - 1, n}) {
    auto it = samples.find(k);
    if (it == samples.end() || it->second.empty())
      throw std::invalid_argument(
          "calibrate_references: no samples for k=" + std::to_string(k));
  }
  std::vector<double> none, some, not_all, all;
  for (const auto& [k, v] : samples) {
    if (k < 0 || k > n)
      throw std::invalid_argument("calibrate_references: k out of range");
    auto& lower_side = k == 0 ? none : some;
    auto& upper_side = k == n ? all : not_all;
    lower_side.insert(lower_side.end(), v.begin(), v.end());
    upper_side.insert(upper_side.end(), v.begin(), v.end());
  }
  const ThresholdFit low = fit_threshold(none, some);
  const ThresholdFit high = fit_threshold(not_all, all);
  ReferenceCalibration cal{{n, low.threshold, high.threshold},
                           low.errors,
                           high.errors};
  if (!cal.refs.valid())
    throw std::runtime_error("calibrate_references: references not ordered (" +
                             std::to_string(low.threshold) + ", " +
                             std::to_string(high.threshold) + ")");
  return cal;
}

enum class PatternSampling {
  PerClass,  // k uniform in 0..n, then a uniform pattern with popcount k
  Uniform    // uniform over all 2^n patterns
};

/// Uniform random pattern of length n with exactly k ones.
inline OperandPattern pattern_with_popcount(int n, int k, Rng& rng) {
  OperandPattern p;
  p.bits.assign(n, 0);
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[i] = i;
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.below(n - i));
    std::swap(pos[i], pos[j]);
    p.bits[pos[i]] = 1;
  }
  return p;
}

inline OperandPattern sample_pattern(int n, PatternSampling mode, Rng& rng) {
  if (mode == PatternSampling::PerClass)
    return pattern_with_popcount(n, static_cast<int>(rng.below(n + 1)), rng);
  OperandPattern p;
  p.bits.resize(n);
  for (auto& b : p.bits) b = static_cast<std::uint8_t>(rng() >> 63);
  return p;
}

using ArrayFactory = std::function<CrossbarArray()>;

struct ScoutingSetup {
  DeviceParams params;
  Strategy strategy = Strategy::FC_SP;
  /// Window for logic-1 cells under smart programming. RAW uses the
  /// device's LRS distribution (set_median_g should be unset).
  TargetLevel lrs_level{0, 55.0, 65.0, std::nullopt};
  ProgramOptions program;
  /// Read time after the last operand finished programming.
  double t_read = 1.0;
  int training_per_class = 1000;
  PatternSampling sampling = PatternSampling::PerClass;
  /// SET/RESET cycles applied to each cell before it is programmed.
  std::uint64_t precycles = 0;
  ArrayFactory array_factory;  // defaults to a 32x32 array
};

/// Program `pattern` into row 0, wait t_read, and return the summed current.
inline double scouting_read(const ScoutingSetup& s,
                            const OperandPattern& pattern, Rng& rng) {
  CrossbarArray array = s.array_factory ? s.array_factory()
                                        : CrossbarArray(32, 32, s.params);
  const auto n = static_cast<std::size_t>(pattern.size());
  if (n > array.cols())
    throw std::invalid_argument("scouting: more operands than columns");
  SelectionMask mask{0, {}};
  for (std::size_t c = 0; c < n; ++c) {
    if (s.precycles) array.precycle(0, c, s.precycles);
    const ProgramTarget target =
        pattern.bits[c] ? ProgramTarget{s.lrs_level} : ProgramTarget{HrsTarget{}};
    array.program_cell(0, c, target, s.strategy, s.params, rng, s.program);
    mask.cols.insert(c);
  }
  array.advance_clock(s.t_read);
  return array.read_parallel(mask, s.params, rng);
}

// Substream tags.
inline constexpr std::uint64_t kTagTraining = 0x7261696e;
inline constexpr std::uint64_t kTagTrial = 0x747269616c;

/// Training currents per popcount class, `training_per_class` each.
inline std::map<int, std::vector<double>> training_currents(
    const ScoutingSetup& s, int n, std::uint64_t seed, unsigned workers = 1) {
  const auto per = static_cast<std::size_t>(std::max(1, s.training_per_class));
  std::vector<double> flat((n + 1) * per);
  parallel_for(flat.size(), workers, [&](std::size_t i) {
    const auto k = static_cast<int>(i / per);
    Rng rng = Rng::substream(seed, {kTagTraining, static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(k), i % per});
    flat[i] = scouting_read(s, pattern_with_popcount(n, k, rng), rng);
  });
  std::map<int, std::vector<double>> out;
  for (int k = 0; k <= n; ++k)
    out[k].assign(flat.begin() + k * per, flat.begin() + (k + 1) * per);
  return out;
}

inline ReferenceCalibration calibrate(const ScoutingSetup& s, int n,
                                      std::uint64_t seed,
                                      unsigned workers = 1) {
  return calibrate_references(training_currents(s, n, seed, workers), n);
}

struct ScoutingTrial {
  OperandPattern pattern;
  double i_total = 0.0;

  int k() const { return pattern.popcount(); }
};

/// Independent test reads; trial i draws from substream (seed, trial, n, i)
/// so the same seed reproduces the same patterns and currents.
inline std::vector<ScoutingTrial> run_trials(const ScoutingSetup& s, int n,
                                             std::size_t trials,
                                             std::uint64_t seed,
                                             unsigned workers = 1) {
  std::vector<ScoutingTrial> out(trials);
  parallel_for(trials, workers, [&](std::size_t i) {
    Rng rng = Rng::substream(seed, {kTagTrial, static_cast<std::uint64_t>(n), i});
    out[i].pattern = sample_pattern(n, s.sampling, rng);
    out[i].i_total = scouting_read(s, out[i].pattern, rng);
  });
  return out;
}

inline Proportion score(LogicOp op, std::span<const ScoutingTrial> trials,
                        const ReferenceSet& refs) {
  Proportion p{0, trials.size()};
  for (const auto& t : trials)
    p.hits += classify(op, t.i_total, refs) == truth(op, t.pattern);
  return p;
}

/// Correct/total per popcount class, indexed by k.
inline std::vector<Proportion> score_per_class(
    LogicOp op, std::span<const ScoutingTrial> trials,
    const ReferenceSet& refs, int n) {
  std::vector<Proportion> out(n + 1);
  for (const auto& t : trials) {
    auto& p = out.at(t.k());
    ++p.total;
    p.hits += classify(op, t.i_total, refs) == truth(op, t.pattern);
  }
  return out;
}

inline double binomial_coefficient(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0));
}

/// Success over uniformly random 2^n patterns reconstructed from per-class
/// rates: sum_k C(n,k)/2^n * s_k. Also returns its standard error.
inline std::pair<double, double> binomial_weighted_success(
    std::span<const Proportion> per_class, int n) {
  double mean = 0.0, var = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = binomial_coefficient(n, k) / std::ldexp(1.0, n);
    const auto& p = per_class[k];
    if (p.total == 0)
      throw std::invalid_argument("binomial_weighted_success: empty class");
    mean += w * p.fraction();
    var += w * w * p.fraction() * (1.0 - p.fraction()) / p.total;
  }
  return {mean, std::sqrt(var)};
}

struct SuccessResult {
  ReferenceCalibration calibration;
  std::vector<ScoutingTrial> trials;
  Proportion success;
};

/// Calibrate references on fresh training populations, then run `trials`
/// independent reads and score them against the truth table.
inline SuccessResult success_rate(LogicOp op, int n, const ScoutingSetup& s,
                                  std::size_t trials, std::uint64_t seed,
                                  unsigned workers = 1) {
  if (trials < 1) throw std::invalid_argument("success_rate: trials < 1");
  SuccessResult r;
  r.calibration = calibrate(s, n, seed, workers);
  r.trials = run_trials(s, n, trials, seed, workers);
  r.success = score(op, r.trials, r.calibration.refs);
  return r;
}

struct EndurancePoint {
  int decade = 0;
  std::vector<ScoutingTrial> trials;
  Proportion success;
};

/// Success after 10^d SET/RESET cycles for each decade d (d = 0 means
/// uncycled). References come from uncycled cells and stay fixed; every
/// decade replays the same trial substreams.
inline std::vector<EndurancePoint> endurance_sweep(
    LogicOp op, int n, const ScoutingSetup& s, std::span<const int> decades,
    std::size_t trials, std::uint64_t seed, unsigned workers = 1,
    std::optional<ReferenceCalibration> fixed = std::nullopt) {
  if (!std::is_sorted(decades.begin(), decades.end()))
    throw std::invalid_argument("endurance_sweep: decades must be ascending");
  ScoutingSetup base = s;
  base.precycles = 0;
  const ReferenceCalibration cal =
      fixed ? *fixed : calibrate(base, n, seed, workers);
  std::vector<EndurancePoint> out;
  for (int d : decades) {
    if (d < 0 || d > 18)
      throw std::invalid_argument("endurance_sweep: decade out of range");
    ScoutingSetup cycled = base;
    cycled.precycles = 0;
    if (d > 0) {
      cycled.precycles = 1;
      for (int i = 0; i < d; ++i) cycled.precycles *= 10;
    }
    EndurancePoint pt{d, run_trials(cycled, n, trials, seed, workers), {}};
    pt.success = score(op, pt.trials, cal.refs);
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace rram

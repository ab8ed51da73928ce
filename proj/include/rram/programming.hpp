#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rram/device.hpp"
#include "rram/parallel.hpp"
#include "rram/rng.hpp"

namespace rram {

enum class Strategy { PC_SP, FC_SP, RAW };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::PC_SP: return "PC_SP";
    case Strategy::FC_SP: return "FC_SP";
    case Strategy::RAW: return "RAW";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "PC_SP") return Strategy::PC_SP;
  if (name == "FC_SP") return Strategy::FC_SP;
  if (name == "RAW") return Strategy::RAW;
  return std::nullopt;
}

/// Conductance acceptance window of one MLC level.
struct TargetLevel {
  int index = 0;
  double g_min = 0.0;
  double g_max = 0.0;
  /// Median of the SET pulse used to reach this level (compliance setting).
  /// Unset means the device's LRS median.
  std::optional<double> set_median_g;

  bool contains(double g) const { return g >= g_min && g <= g_max; }
  double center() const { return 0.5 * (g_min + g_max); }

  bool operator==(const TargetLevel&) const = default;
};

struct LevelScheme {
  std::vector<TargetLevel> levels;
  bool hrs_included = false;
};

/// Marker for the unprogrammed high-resistive state.
struct HrsTarget {};

struct ProgramOutcome {
  bool converged = false;
  int iterations = 0;
  CellState final_cell;
  /// Simulation time when programming finished (after the last verify).
  double finish_time = 0.0;
};

inline constexpr int kDefaultMaxIter = 100;
inline constexpr double kDefaultDeltaT = 5.0;

namespace detail {

inline ProgramOutcome verify_loop(const CellState& cell,
                                  const TargetLevel& level,
                                  const DeviceParams& p, int max_iter,
                                  double delta_t, Rng& rng, double clock) {
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(delta_t >= 0.0)) throw std::invalid_argument("delta_t must be >= 0");
  ProgramOutcome out;
  out.final_cell = cell;
  double now = clock;
  for (int i = 1; i <= max_iter; ++i) {
    CellState c = reset_pulse(out.final_cell, p, rng, now);
    c = set_pulse(c, p, rng, now, level.set_median_g);
    const double verify_time = now + delta_t;
    const double g = conductance_at(c, p, verify_time);
    now = verify_time;
    out.final_cell = c;
    out.iterations = i;
    if (level.contains(g)) {
      out.converged = true;
      break;
    }
  }
  out.finish_time = now;
  return out;
}

}  // namespace detail

/// Partial-correction smart programming: RESET+SET, verify immediately.
inline ProgramOutcome pc_sp(const CellState& cell, const TargetLevel& level,
                            const DeviceParams& p, int max_iter, Rng& rng,
                            double clock) {
  return detail::verify_loop(cell, level, p, max_iter, 0.0, rng, clock);
}

/// Full-correction smart programming: RESET+SET, wait delta_t, verify.
/// The clock advances by delta_t per iteration.
inline ProgramOutcome fc_sp(const CellState& cell, const TargetLevel& level,
                            const DeviceParams& p, int max_iter,
                            double delta_t, Rng& rng, double clock) {
  return detail::verify_loop(cell, level, p, max_iter, delta_t, rng, clock);
}

/// HRS is reached by one RESET without verification.
inline ProgramOutcome program_hrs(const CellState& cell, const DeviceParams& p,
                                  Rng& rng, double clock) {
  return ProgramOutcome{true, 1, reset_pulse(cell, p, rng, clock), clock};
}

struct ProgramOptions {
  int max_iter = kDefaultMaxIter;
  double delta_t = kDefaultDeltaT;
};

using ProgramTarget = std::variant<TargetLevel, HrsTarget>;

/// Write one cell with the given strategy. RAW fires a single SET at the
/// level's median (reported converged only if it landed in the window);
/// HRS targets always take one unverified RESET.
inline ProgramOutcome program(const CellState& cell, const ProgramTarget& target,
                              Strategy strategy, const DeviceParams& p,
                              Rng& rng, double clock,
                              const ProgramOptions& opts = {}) {
  if (std::holds_alternative<HrsTarget>(target))
    return program_hrs(cell, p, rng, clock);
  const auto& level = std::get<TargetLevel>(target);
  switch (strategy) {
    case Strategy::RAW: {
      CellState next = set_pulse(cell, p, rng, clock, level.set_median_g);
      return ProgramOutcome{level.contains(next.g0), 1, next, clock};
    }
    case Strategy::PC_SP:
      return pc_sp(cell, level, p, opts.max_iter, rng, clock);
    case Strategy::FC_SP:
      return fc_sp(cell, level, p, opts.max_iter, opts.delta_t, rng, clock);
  }
  throw std::invalid_argument("program: unknown strategy");
}

/// Independently program `count` fresh cells toward one target, each on
/// its own clock starting at 0 and its own substream (seed, i).
inline std::vector<ProgramOutcome> program_population(
    std::size_t count, const ProgramTarget& target, Strategy strategy,
    const DeviceParams& p, const ProgramOptions& opts, std::uint64_t seed,
    unsigned workers = 1) {
  std::vector<ProgramOutcome> out(count);
  parallel_for(count, workers, [&](std::size_t i) {
    Rng rng = Rng::substream(seed, {i});
    out[i] = program(fresh_cell(p), target, strategy, p, rng, 0.0, opts);
  });
  return out;
}

/// Number of cells whose conductance at absolute time t lies outside the
/// level window.
inline std::size_t bec(std::span<const CellState> cells,
                       const TargetLevel& level, const DeviceParams& p,
                       double t) {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [&](const CellState& c) {
        return !level.contains(conductance_at(c, p, t));
      }));
}

/// BEC read `after` seconds past each cell's own programming completion.
/// Non-converged cells always count as errors.
inline std::size_t bec_after(std::span<const ProgramOutcome> outcomes,
                             const TargetLevel& level, const DeviceParams& p,
                             double after) {
  return static_cast<std::size_t>(std::count_if(
      outcomes.begin(), outcomes.end(), [&](const ProgramOutcome& o) {
        return !o.converged ||
               !level.contains(
                   conductance_at(o.final_cell, p, o.finish_time + after));
      }));
}

/// Linearly spaced level windows [c_i - w, c_i + w]; each level's SET
/// median is its window center.
inline LevelScheme make_level_scheme(int n_levels, double g_lo, double g_hi,
                                     double window_half_width) {
  if (n_levels < 2) throw std::invalid_argument("n_levels must be >= 2");
  if (!(g_hi > g_lo)) throw std::invalid_argument("g_hi must exceed g_lo");
  if (!(window_half_width > 0.0))
    throw std::invalid_argument("window_half_width must be > 0");
  const double spacing = (g_hi - g_lo) / (n_levels - 1);
  if (!(spacing > 2.0 * window_half_width))
    throw std::invalid_argument("level windows overlap: spacing " +
                                std::to_string(spacing) + " <= 2*w");
  if (!(g_lo - window_half_width > 0.0))
    throw std::invalid_argument("lowest window must stay above 0 µS");
  LevelScheme scheme;
  for (int i = 0; i < n_levels; ++i) {
    const double c = g_lo + i * spacing;
    scheme.levels.push_back(
        TargetLevel{i, c - window_half_width, c + window_half_width, c});
  }
  return scheme;
}

}  // namespace rram

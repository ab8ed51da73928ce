#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rram/rng.hpp"

namespace rram {

// Conductances are in µS, currents in µA, voltages in V, times in s.

/// Simulated time after programming at which relaxation has fully settled.
inline constexpr double kRelaxSaturation = 3600.0;

/// Conductance floor applied after relaxation drift.
inline constexpr double kConductanceFloor = 0.1;

struct DeviceParams {
  double lrs_median_g = 60.0;
  double lrs_sigma = 0.4;
  double hrs_median_g = 2.0;
  double hrs_sigma = 0.5;
  double relax_sigma_inf = 2.5;
  double relax_tau = 1e-120;
  double relax_drift_mu = -0.5;
  double endurance_widen_per_decade = 0.01;
  double read_noise_sigma = 0.2;
  double v_read = 0.4;

  /// Human-readable violations; empty when the parameter set is usable.
  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    auto finite = [&](double v, const char* name) {
      if (!std::isfinite(v)) out.push_back(std::string(name) + " must be finite");
    };
    finite(lrs_median_g, "lrs_median_g");
    finite(hrs_median_g, "hrs_median_g");
    finite(relax_drift_mu, "relax_drift_mu");
    if (!(hrs_median_g > 0.0))
      out.emplace_back("hrs_median_g must be > 0");
    if (!(lrs_median_g > hrs_median_g))
      out.emplace_back("lrs_median_g must be > hrs_median_g");
    const std::pair<double, const char*> sigmas[] = {
        {lrs_sigma, "lrs_sigma"},
        {hrs_sigma, "hrs_sigma"},
        {relax_sigma_inf, "relax_sigma_inf"},
        {endurance_widen_per_decade, "endurance_widen_per_decade"},
        {read_noise_sigma, "read_noise_sigma"}};
    for (const auto& [v, name] : sigmas)
      if (!(v >= 0.0) || !std::isfinite(v))
        out.push_back(std::string(name) + " must be >= 0");
    if (!(relax_tau > 0.0)) out.emplace_back("relax_tau must be > 0");
    if (!(v_read > 0.0)) out.emplace_back("v_read must be > 0");
    return out;
  }

  void validate() const {
    auto v = violations();
    if (!v.empty()) throw std::invalid_argument("DeviceParams: " + v.front());
  }

  bool operator==(const DeviceParams&) const = default;
};

enum class StateKind : std::uint8_t { LRS, HRS };

inline const char* to_string(StateKind k) {
  return k == StateKind::LRS ? "LRS" : "HRS";
}

struct CellState {
  double g0 = 2.0;
  double relax_draw = 0.0;  // frozen between program events
  double t_program = 0.0;
  std::uint64_t cycles = 0;
  StateKind state_kind = StateKind::HRS;

  bool operator==(const CellState&) const = default;
};

/// A pristine cell in HRS at the median conductance.
inline CellState fresh_cell(const DeviceParams& p, double now = 0.0) {
  return CellState{p.hrs_median_g, 0.0, now, 0, StateKind::HRS};
}

/// Cycle-to-cycle shape after `cycles` SET/RESET cycles:
/// sigma * (1 + widen)^log10(max(cycles, 1)).
inline double effective_sigma(double sigma, double widen_per_decade,
                              std::uint64_t cycles) {
  const double decades =
      std::log10(static_cast<double>(std::max<std::uint64_t>(cycles, 1)));
  return sigma * std::pow(1.0 + widen_per_decade, decades);
}

/// Fraction of the saturated relaxation realised `elapsed` seconds after a
/// program pulse. 0 at elapsed = 0, exactly 1 from kRelaxSaturation on.
inline double relaxation_envelope(double elapsed, double tau) {
  if (elapsed <= 0.0) return 0.0;
  if (elapsed >= kRelaxSaturation) return 1.0;
  const double f =
      std::log1p(elapsed / tau) / std::log1p(kRelaxSaturation / tau);
  return std::clamp(f, 0.0, 1.0);
}

/// SET: resample the LRS conductance. `median_g` models the compliance
/// setting of the pulse; it defaults to the device's LRS median.
/// Counts one SET/RESET cycle.
inline CellState set_pulse(const CellState& cell, const DeviceParams& p,
                           Rng& rng, double now,
                           std::optional<double> median_g = std::nullopt) {
  CellState next = cell;
  const double sigma =
      effective_sigma(p.lrs_sigma, p.endurance_widen_per_decade, cell.cycles);
  next.g0 = rng.lognormal(median_g.value_or(p.lrs_median_g), sigma);
  next.relax_draw = rng.normal();
  next.t_program = now;
  next.cycles = cell.cycles + 1;
  next.state_kind = StateKind::LRS;
  return next;
}

/// RESET: resample the HRS conductance. The cycle is counted on the SET.
inline CellState reset_pulse(const CellState& cell, const DeviceParams& p,
                             Rng& rng, double now) {
  CellState next = cell;
  const double sigma =
      effective_sigma(p.hrs_sigma, p.endurance_widen_per_decade, cell.cycles);
  next.g0 = rng.lognormal(p.hrs_median_g, sigma);
  next.relax_draw = rng.normal();
  next.t_program = now;
  next.state_kind = StateKind::HRS;
  return next;
}

/// Relaxed conductance at absolute simulation time `t`.
inline double conductance_at(const CellState& cell, const DeviceParams& p,
                             double t) {
  if (t < cell.t_program)
    throw std::domain_error("conductance_at: t precedes the program event");
  const double f = relaxation_envelope(t - cell.t_program, p.relax_tau);
  const double g =
      cell.g0 + f * (p.relax_drift_mu + p.relax_sigma_inf * cell.relax_draw);
  return std::max(g, kConductanceFloor);
}

/// Sensed current at `t`, with a fresh additive noise draw per call.
inline double read_current(const CellState& cell, const DeviceParams& p,
                           double t, Rng& rng) {
  return conductance_at(cell, p, t) * p.v_read +
         p.read_noise_sigma * rng.normal();
}

}  // namespace rram

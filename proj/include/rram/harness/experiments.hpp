#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rram/adder.hpp"
#include "rram/harness/config.hpp"
#include "rram/harness/io.hpp"
#include "rram/programming.hpp"
#include "rram/scouting.hpp"
#include "rram/stats.hpp"

namespace rram::harness {

/// Fixed CSV header per experiment kind.
inline std::vector<std::string> csv_schema(ExperimentKind kind) {
  using K = ExperimentKind;
  switch (kind) {
    case K::Relaxation:
      return {"strategy", "level", "delta_t", "cell", "t", "conductance",
              "in_window"};
    case K::BecIterations:
      return {"strategy", "level", "delta_t", "iteration", "bec", "cells"};
    case K::BecTime:
    case K::Retention:
      return {"strategy", "level", "delta_t", "t", "bec", "cells", "fraction"};
    case K::CurrentHistogram:
      return {"strategy", "n", "k", "sample", "i_total"};
    case K::ScoutingSuccess:
    case K::Endurance:
      return {"op",    "n",         "strategy", "k",     "decade",
              "t_read", "i_total",  "predicted", "truth", "correct"};
    case K::Adder:
    case K::Adder3:
      return {"n_inputs", "strategy", "operands", "t_read", "i_total",
              "true_sum", "decoded_sum"};
    case K::Calibrate:
      return {"target", "strategy", "n", "index", "threshold", "train_errors"};
  }
  return {};
}

struct ExperimentResult {
  std::string kind;
  CsvTable table;
  json summary;
};

inline json proportion_json(const Proportion& p) {
  const Interval ci = p.wald();
  return {{"hits", p.hits},
          {"total", p.total},
          {"fraction", p.fraction()},
          {"ci95", {ci.lo, ci.hi}}};
}

namespace detail {

inline std::uint64_t condition_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> keys) {
  Rng rng = Rng::substream(seed, keys);
  return rng();
}

inline std::uint64_t key(Strategy s) { return static_cast<std::uint64_t>(s) + 1; }

inline int median_iterations(const std::vector<ProgramOutcome>& outs) {
  std::vector<int> it;
  it.reserve(outs.size());
  for (const auto& o : outs) it.push_back(o.iterations);
  auto mid = it.begin() + static_cast<std::ptrdiff_t>(it.size() / 2);
  std::nth_element(it.begin(), mid, it.end());
  return *mid;
}

inline std::size_t unconverged(const std::vector<ProgramOutcome>& outs) {
  return static_cast<std::size_t>(std::count_if(
      outs.begin(), outs.end(), [](const auto& o) { return !o.converged; }));
}

/// (strategy, delta_t) pairs a programming experiment sweeps. Only FC-SP
/// waits; the others verify (or fire) at delta_t = 0.
inline std::vector<std::pair<Strategy, double>> programming_conditions(
    const ExperimentConfig& c) {
  std::vector<std::pair<Strategy, double>> out;
  for (Strategy s : c.strategies) {
    if (s == Strategy::FC_SP) {
      const auto dts =
          c.delta_ts.empty() ? std::vector<double>{c.program.delta_t} : c.delta_ts;
      for (double dt : dts) out.emplace_back(s, dt);
    } else {
      out.emplace_back(s, 0.0);
    }
  }
  return out;
}

inline std::vector<ProgramOutcome> population(const ExperimentConfig& c,
                                              Strategy s, double delta_t,
                                              const TargetLevel& level,
                                              unsigned workers) {
  ProgramOptions opts = c.program;
  opts.delta_t = delta_t;
  const std::uint64_t seed = condition_seed(
      *c.seed, {0x706f70, key(s), static_cast<std::uint64_t>(level.index),
                std::bit_cast<std::uint64_t>(delta_t)});
  return program_population(c.cells, level, s, c.device, opts, seed, workers);
}

inline ScoutingSetup scouting_setup(const ExperimentConfig& c, Strategy s,
                                    double t_read) {
  ScoutingSetup setup;
  setup.params = c.device;
  setup.strategy = s;
  setup.lrs_level = c.lrs_window;
  setup.program = c.program;
  setup.t_read = t_read;
  setup.training_per_class = c.training_per_class;
  setup.sampling = c.sampling;
  return setup;
}

inline std::uint64_t scouting_seed(const ExperimentConfig& c, Strategy s,
                                   double t_read) {
  return condition_seed(*c.seed, {0x73636f75, key(s),
                                  std::bit_cast<std::uint64_t>(t_read)});
}

inline json refs_json(const ReferenceCalibration& cal) {
  return {{"i_ref_low", cal.refs.i_ref_low},
          {"i_ref_high", cal.refs.i_ref_high},
          {"low_train_errors", cal.low_errors},
          {"high_train_errors", cal.high_errors}};
}

inline void emit_scouting_rows(CsvTable& table, LogicOp op, int n, Strategy s,
                               int decade, double t_read,
                               std::span<const ScoutingTrial> trials,
                               const ReferenceSet& refs) {
  for (const auto& t : trials) {
    const bool predicted = classify(op, t.i_total, refs);
    const bool expected = truth(op, t.pattern);
    table.add_row(to_string(op), n, to_string(s), t.k(), decade, t_read,
                  t.i_total, predicted, expected, predicted == expected);
  }
}

inline json per_class_json(LogicOp op, std::span<const ScoutingTrial> trials,
                           const ReferenceSet& refs, int n) {
  json out = json::array();
  const auto per = score_per_class(op, trials, refs, n);
  for (int k = 0; k <= n; ++k)
    out.push_back({{"k", k}, {"success", proportion_json(per[k])}});
  return out;
}

// --- experiment kinds -----------------------------------------------------

inline json run_relaxation(const ExperimentConfig& c, CsvTable& table,
                           unsigned workers) {
  const LevelScheme scheme = c.level_scheme();
  json results = json::array();
  for (auto [s, dt] : programming_conditions(c)) {
    for (int li : c.levels) {
      const TargetLevel& level = scheme.levels[li];
      const auto outs = population(c, s, dt, level, workers);
      std::vector<Proportion> out_of_window(c.times.size());
      for (std::size_t i = 0; i < outs.size(); ++i) {
        for (std::size_t ti = 0; ti < c.times.size(); ++ti) {
          const double g = conductance_at(outs[i].final_cell, c.device,
                                          outs[i].finish_time + c.times[ti]);
          const bool inside = outs[i].converged && level.contains(g);
          table.add_row(to_string(s), li, dt, i, c.times[ti], g, inside);
          ++out_of_window[ti].total;
          out_of_window[ti].hits += !inside;
        }
      }
      json per_time = json::array();
      for (std::size_t ti = 0; ti < c.times.size(); ++ti)
        per_time.push_back({{"t", c.times[ti]},
                            {"out_of_window", proportion_json(out_of_window[ti])}});
      results.push_back({{"strategy", to_string(s)},
                         {"level", li},
                         {"delta_t", dt},
                         {"window", {level.g_min, level.g_max}},
                         {"median_iterations", median_iterations(outs)},
                         {"unconverged", unconverged(outs)},
                         {"times", per_time}});
    }
  }
  return results;
}

inline json run_bec_iterations(const ExperimentConfig& c, CsvTable& table,
                               unsigned workers) {
  const LevelScheme scheme = c.level_scheme();
  json results = json::array();
  for (auto [s, dt] : programming_conditions(c)) {
    for (int li : c.levels) {
      const auto outs = population(c, s, dt, scheme.levels[li], workers);
      // BEC after m iterations = cells still unverified.
      std::vector<std::size_t> done_at(c.program.max_iter + 2, 0);
      for (const auto& o : outs)
        if (o.converged) ++done_at[o.iterations];
      std::size_t remaining = outs.size();
      double mean_it = 0.0;
      for (const auto& o : outs) mean_it += o.iterations;
      mean_it /= static_cast<double>(outs.size());
      for (int m = 1; m <= c.program.max_iter; ++m) {
        remaining -= done_at[m];
        table.add_row(to_string(s), li, dt, m, remaining, outs.size());
        if (remaining == 0) break;
      }
      results.push_back({{"strategy", to_string(s)},
                         {"level", li},
                         {"delta_t", dt},
                         {"median_iterations", median_iterations(outs)},
                         {"mean_iterations", mean_it},
                         {"unconverged", unconverged(outs)}});
    }
  }
  return results;
}

inline json run_bec_time(const ExperimentConfig& c, CsvTable& table,
                         unsigned workers) {
  const LevelScheme scheme = c.level_scheme();
  json results = json::array();
  for (auto [s, dt] : programming_conditions(c)) {
    for (int li : c.levels) {
      const TargetLevel& level = scheme.levels[li];
      const auto outs = population(c, s, dt, level, workers);
      json per_time = json::array();
      for (double t : c.times) {
        const Proportion p{bec_after(outs, level, c.device, t), outs.size()};
        table.add_row(to_string(s), li, dt, t, p.hits, p.total, p.fraction());
        per_time.push_back({{"t", t}, {"bec", proportion_json(p)}});
      }
      results.push_back({{"strategy", to_string(s)},
                         {"level", li},
                         {"delta_t", dt},
                         {"times", per_time}});
    }
  }
  return results;
}

inline json run_histogram(const ExperimentConfig& c, CsvTable& table,
                          unsigned workers) {
  json results = json::array();
  for (Strategy s : c.strategies) {
    for (int n : c.n) {
      ScoutingSetup setup = scouting_setup(c, s, c.t_read.front());
      setup.training_per_class = static_cast<int>(c.trials);
      const auto samples = training_currents(
          setup, n, scouting_seed(c, s, c.t_read.front()), workers);
      json classes = json::array();
      for (const auto& [k, v] : samples) {
        double mean = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
          table.add_row(to_string(s), n, k, i, v[i]);
          mean += v[i];
        }
        mean /= static_cast<double>(v.size());
        for (double x : v) sq += (x - mean) * (x - mean);
        classes.push_back({{"k", k},
                           {"mean", mean},
                           {"std", std::sqrt(sq / std::max<std::size_t>(1, v.size() - 1))}});
      }
      results.push_back({{"strategy", to_string(s)},
                         {"n", n},
                         {"references", refs_json(calibrate_references(samples, n))},
                         {"classes", classes}});
    }
  }
  return results;
}

inline json run_scouting(const ExperimentConfig& c, CsvTable& table,
                         unsigned workers) {
  json results = json::array();
  for (Strategy s : c.strategies) {
    for (int n : c.n) {
      for (double t_read : c.t_read) {
        const ScoutingSetup setup = scouting_setup(c, s, t_read);
        const std::uint64_t seed = scouting_seed(c, s, t_read);
        const ReferenceCalibration cal = calibrate(setup, n, seed, workers);
        const auto trials = run_trials(setup, n, c.trials, seed, workers);
        for (LogicOp op : c.ops) {
          emit_scouting_rows(table, op, n, s, 0, t_read, trials, cal.refs);
          results.push_back({{"op", to_string(op)},
                             {"n", n},
                             {"strategy", to_string(s)},
                             {"t_read", t_read},
                             {"references", refs_json(cal)},
                             {"success", proportion_json(score(op, trials, cal.refs))},
                             {"per_k", per_class_json(op, trials, cal.refs, n)}});
        }
      }
    }
  }
  return results;
}

inline json run_endurance(const ExperimentConfig& c, CsvTable& table,
                          unsigned workers) {
  json results = json::array();
  for (Strategy s : c.strategies) {
    for (int n : c.n) {
      for (double t_read : c.t_read) {
        const ScoutingSetup setup = scouting_setup(c, s, t_read);
        const std::uint64_t seed = scouting_seed(c, s, t_read);
        const ReferenceCalibration cal = calibrate(setup, n, seed, workers);
        const auto sweep = endurance_sweep(c.ops.front(), n, setup, c.decades,
                                           c.trials, seed, workers, cal);
        for (LogicOp op : c.ops) {
          json points = json::array();
          for (const auto& pt : sweep) {
            emit_scouting_rows(table, op, n, s, pt.decade, t_read, pt.trials,
                               cal.refs);
            points.push_back(
                {{"decade", pt.decade},
                 {"success", proportion_json(score(op, pt.trials, cal.refs))}});
          }
          results.push_back({{"op", to_string(op)},
                             {"n", n},
                             {"strategy", to_string(s)},
                             {"t_read", t_read},
                             {"references", refs_json(cal)},
                             {"decades", points}});
        }
      }
    }
  }
  return results;
}

inline std::string operands_field(const std::vector<int>& ops) {
  std::string out;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(ops[i]);
  }
  return out;
}

inline AdderSetup adder_setup(const ExperimentConfig& c, Strategy s,
                              int n_inputs, double t_read) {
  AdderSetup a;
  a.params = c.device;
  a.strategy = s;
  a.scheme = c.level_scheme();
  a.n_inputs = n_inputs;
  a.program = c.program;
  a.t_read = t_read;
  a.training_per_state = c.training_per_class;
  return a;
}

inline std::uint64_t adder_seed(const ExperimentConfig& c, Strategy s,
                                int n_inputs, double t_read) {
  return condition_seed(*c.seed, {0x61646431, key(s),
                                  static_cast<std::uint64_t>(n_inputs),
                                  std::bit_cast<std::uint64_t>(t_read)});
}

inline json error_report_json(const ErrorReport& r) {
  json pairs = json::array();
  for (const auto& p : r.adjacent)
    pairs.push_back({{"states", {p.lower, p.lower + 1}},
                     {"error", proportion_json(p.errors)}});
  return {{"adjacent", pairs},
          {"overall", proportion_json(r.overall)},
          {"non_adjacent", proportion_json(r.non_adjacent)},
          {"programming_failures", r.programming_failures},
          {"mean_abs_error", r.mean_abs_error}};
}

/// Binary form of a decoded sum, most significant bit first.
inline std::string sum_bits(int sum, int width) {
  std::string s(width, '0');
  for (int b = 0; b < width; ++b)
    if (sum >> b & 1) s[width - 1 - b] = '1';
  return s;
}

inline json run_adder(const ExperimentConfig& c, int n_inputs, CsvTable& table,
                      unsigned workers) {
  json results = json::array();
  const int width = n_inputs == 2 ? 3 : 4;
  json encoding = json::object();
  for (int s = 0; s <= max_sum(n_inputs); ++s)
    encoding[std::to_string(s)] = sum_bits(s, width);
  for (Strategy s : c.strategies) {
    for (double t_read : c.t_read) {
      const AdderSetup setup = adder_setup(c, s, n_inputs, t_read);
      const std::uint64_t seed = adder_seed(c, s, n_inputs, t_read);
      const AdderConfig cfg = train_adder(setup, seed, workers);
      const auto trials = run_adder_trials(setup, cfg, c.trials, seed, workers);
      for (const auto& t : trials)
        table.add_row(n_inputs, to_string(s), operands_field(t.operands), t_read,
                      t.i_total, t.true_sum, t.decoded_sum);
      json report = error_report_json(error_report(trials, n_inputs));
      report["strategy"] = to_string(s);
      report["n_inputs"] = n_inputs;
      report["t_read"] = t_read;
      report["decode_thresholds"] = cfg.decode_thresholds;
      report["sum_encoding"] = encoding;
      results.push_back(std::move(report));
    }
  }
  return results;
}

inline json run_calibrate(const ExperimentConfig& c, CsvTable& table,
                          unsigned workers) {
  json results = json::array();
  const double t_read = c.t_read.front();
  for (Strategy s : c.strategies) {
    for (int n : c.n) {
      const ScoutingSetup setup = scouting_setup(c, s, t_read);
      const auto cal = calibrate(setup, n, scouting_seed(c, s, t_read), workers);
      table.add_row("scouting", to_string(s), n, 0, cal.refs.i_ref_low,
                    cal.low_errors);
      table.add_row("scouting", to_string(s), n, 1, cal.refs.i_ref_high,
                    cal.high_errors);
      results.push_back({{"target", "scouting"},
                         {"strategy", to_string(s)},
                         {"n", n},
                         {"references", refs_json(cal)}});
    }
    for (int n_inputs : {2, 3}) {
      const AdderSetup setup = adder_setup(c, s, n_inputs, t_read);
      const auto samples =
          adder_training(setup, adder_seed(c, s, n_inputs, t_read), workers);
      const auto thr = build_decoder(samples, n_inputs);
      for (std::size_t i = 0; i < thr.size(); ++i) {
        const auto errs = threshold_errors(samples.at(static_cast<int>(i)),
                                           samples.at(static_cast<int>(i) + 1),
                                           thr[i]);
        table.add_row("adder", to_string(s), n_inputs, i, thr[i], errs);
      }
      results.push_back({{"target", "adder"},
                         {"strategy", to_string(s)},
                         {"n", n_inputs},
                         {"decode_thresholds", thr}});
    }
  }
  return results;
}

}  // namespace detail

/// Run a validated config. Output depends only on (config, seed).
inline ExperimentResult run(const ExperimentConfig& c, unsigned workers = 1) {
  if (auto v = validate(c); !v.empty())
    throw std::invalid_argument("invalid config: " + v.front());
  using K = ExperimentKind;
  ExperimentResult r{c.kind_name, CsvTable(csv_schema(c.kind)), {}};
  json results;
  switch (c.kind) {
    case K::Relaxation: results = detail::run_relaxation(c, r.table, workers); break;
    case K::BecIterations: results = detail::run_bec_iterations(c, r.table, workers); break;
    case K::BecTime:
    case K::Retention: results = detail::run_bec_time(c, r.table, workers); break;
    case K::CurrentHistogram: results = detail::run_histogram(c, r.table, workers); break;
    case K::ScoutingSuccess: results = detail::run_scouting(c, r.table, workers); break;
    case K::Endurance: results = detail::run_endurance(c, r.table, workers); break;
    case K::Adder: results = detail::run_adder(c, 2, r.table, workers); break;
    case K::Adder3: results = detail::run_adder(c, 3, r.table, workers); break;
    case K::Calibrate: results = detail::run_calibrate(c, r.table, workers); break;
  }
  r.summary = {{"kind", c.kind_name},
               {"seed", *c.seed},
               {"preset", c.preset},
               {"generator", Rng::kName},
               {"device", device_to_json(c.device)},
               {"rows", r.table.rows()},
               {"results", std::move(results)}};
  return r;
}

struct OutputPaths {
  std::filesystem::path csv;
  std::filesystem::path summary;
};

inline OutputPaths write_result(const ExperimentResult& r,
                                const std::filesystem::path& dir) {
  OutputPaths p{dir / (r.kind + ".csv"), dir / (r.kind + ".summary.json")};
  write_file_atomic(p.csv, r.table.text());
  write_file_atomic(p.summary, r.summary.dump(2) + "\n");
  return p;
}

}  // namespace rram::harness

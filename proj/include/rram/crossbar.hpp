#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rram/device.hpp"
#include "rram/programming.hpp"
#include "rram/rng.hpp"

namespace rram {

/// Columns of one row read together in IMC mode. Selection is row-wise.
struct SelectionMask {
  std::size_t row = 0;
  std::set<std::size_t> cols;
};

/// Dense rows x cols grid of 1T1R cells sharing one simulation clock.
class CrossbarArray {
 public:
  CrossbarArray(std::size_t rows = 32, std::size_t cols = 32,
                const DeviceParams& params = {})
      : rows_(rows), cols_(cols), cells_(rows * cols, fresh_cell(params)) {
    if (rows == 0 || cols == 0)
      throw std::invalid_argument("crossbar dimensions must be positive");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double clock() const { return clock_; }

  const CellState& cell(std::size_t r, std::size_t c) const {
    return cells_[index(r, c)];
  }

  void advance_clock(double dt) {
    if (!(dt >= 0.0)) throw std::invalid_argument("advance_clock: dt < 0");
    clock_ += dt;
  }

  /// Memory-mode write of one cell (see rram::program); the array clock
  /// advances by the strategy's elapsed time.
  ProgramOutcome program_cell(std::size_t r, std::size_t c,
                              const ProgramTarget& target, Strategy strategy,
                              const DeviceParams& p, Rng& rng,
                              const ProgramOptions& opts = {}) {
    CellState& cell = cells_[index(r, c)];
    const ProgramOutcome out =
        rram::program(cell, target, strategy, p, rng, clock_, opts);
    cell = out.final_cell;
    clock_ = out.finish_time;
    return out;
  }

  /// Add `extra` SET/RESET cycles to a cell's history without sampling.
  void precycle(std::size_t r, std::size_t c, std::uint64_t extra) {
    cells_[index(r, c)].cycles += extra;
  }

  double read_single(std::size_t r, std::size_t c, const DeviceParams& p,
                     Rng& rng) const {
    return read_current(cells_[index(r, c)], p, clock_, rng);
  }

  /// IMC-mode read: ideal sum of the selected cells' currents, each with
  /// its own noise draw, in ascending column order.
  double read_parallel(const SelectionMask& mask, const DeviceParams& p,
                       Rng& rng) const {
    check_mask(mask);
    double total = 0.0;
    for (std::size_t c : mask.cols)
      total += read_current(cells_[index(mask.row, c)], p, clock_, rng);
    return total;
  }

  void check_mask(const SelectionMask& mask) const {
    if (mask.cols.empty())
      throw std::invalid_argument("selection mask is empty");
    if (mask.row >= rows_ || *mask.cols.rbegin() >= cols_)
      throw std::out_of_range("selection mask outside the array");
  }

  /// JSON snapshot: {rows, cols, clock, cells: [{row, col, g0, relax_draw,
  /// t_program, cycles, kind}]}.
  nlohmann::json to_json() const {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) {
        const auto& s = cells_[index(r, c)];
        cells.push_back({{"row", r},
                         {"col", c},
                         {"g0", s.g0},
                         {"relax_draw", s.relax_draw},
                         {"t_program", s.t_program},
                         {"cycles", s.cycles},
                         {"kind", to_string(s.state_kind)}});
      }
    return {{"rows", rows_}, {"cols", cols_}, {"clock", clock_},
            {"cells", std::move(cells)}};
  }

  static CrossbarArray from_json(const nlohmann::json& j) {
    CrossbarArray a(j.at("rows").get<std::size_t>(),
                    j.at("cols").get<std::size_t>());
    a.clock_ = j.at("clock").get<double>();
    for (const auto& e : j.at("cells")) {
      CellState s;
      s.g0 = e.at("g0").get<double>();
      s.relax_draw = e.value("relax_draw", 0.0);
      s.t_program = e.at("t_program").get<double>();
      s.cycles = e.at("cycles").get<std::uint64_t>();
      const auto kind = e.at("kind").get<std::string>();
      if (kind != "LRS" && kind != "HRS")
        throw std::invalid_argument("snapshot: unknown cell kind " + kind);
      s.state_kind = kind == "LRS" ? StateKind::LRS : StateKind::HRS;
      if (!(s.g0 > 0.0)) throw std::invalid_argument("snapshot: g0 <= 0");
      if (s.t_program > a.clock_)
        throw std::invalid_argument("snapshot: t_program after clock");
      a.cells_.at(a.index(e.at("row").get<std::size_t>(),
                          e.at("col").get<std::size_t>())) = s;
    }
    return a;
  }

 private:
  std::size_t index(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_)
      throw std::out_of_range("cell (" + std::to_string(r) + ", " +
                              std::to_string(c) + ") outside the array");
    return r * cols_ + c;
  }

  std::size_t rows_;
  std::size_t cols_;
  std::vector<CellState> cells_;
  double clock_ = 0.0;
};

}  // namespace rram

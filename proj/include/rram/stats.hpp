#pragma once

#include <cmath>
#include <cstddef>

namespace rram {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Count of successes out of a number of Bernoulli trials.
struct Proportion {
  std::size_t hits = 0;
  std::size_t total = 0;

  double fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(hits) / total;
  }

  double std_error() const {
    if (total == 0) return 0.0;
    const double p = fraction();
    return std::sqrt(p * (1.0 - p) / total);
  }

  /// Wald interval, 95% by default.
  Interval wald(double z = 1.959963984540054) const {
    const double p = fraction();
    const double h = z * std_error();
    return {p - h, p + h};
  }
};

}  // namespace rram

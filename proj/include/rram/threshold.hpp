#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rram {

struct ThresholdFit {
  double threshold = 0.0;
  std::size_t errors = 0;  // training misclassifications at `threshold`
};

/// Misclassifications of a threshold that labels values < t as `below`
/// and values >= t as `above`.
inline std::size_t threshold_errors(std::span<const double> below,
                                    std::span<const double> above, double t) {
  std::size_t e = 0;
  for (double v : below) e += v >= t;
  for (double v : above) e += v < t;
  return e;
}

/**
 * Minimum-empirical-error threshold separating two 1-D sample sets.
 *
 * Candidates are the midpoints between adjacent distinct values of the
 * pooled, sorted samples. Among the minimal candidates the first
 * contiguous run (the optimal plateau) is taken and its middle candidate
 * returned; for an even-length run the average of the two middle
 * candidates is used when it scores the same.
 */
inline ThresholdFit fit_threshold(std::span<const double> below,
                                  std::span<const double> above) {
  if (below.empty() || above.empty())
    throw std::invalid_argument("fit_threshold: empty sample set");

  std::vector<std::pair<double, int>> pooled;  // (value, +1 below / -1 above)
  pooled.reserve(below.size() + above.size());
  for (double v : below) pooled.emplace_back(v, 1);
  for (double v : above) pooled.emplace_back(v, -1);
  std::sort(pooled.begin(), pooled.end());

  // With t just above value v: errors = #below > v + #above <= v.
  std::size_t below_gt = below.size();
  std::size_t above_le = 0;
  std::vector<double> cand;
  std::vector<std::size_t> err;
  for (std::size_t i = 0; i < pooled.size();) {
    const double v = pooled[i].first;
    for (; i < pooled.size() && pooled[i].first == v; ++i) {
      if (pooled[i].second > 0)
        --below_gt;
      else
        ++above_le;
    }
    if (i == pooled.size()) break;
    cand.push_back(0.5 * (v + pooled[i].first));
    err.push_back(below_gt + above_le);
  }
  if (cand.empty())
    throw std::invalid_argument("fit_threshold: all samples are identical");

  const std::size_t best = *std::min_element(err.begin(), err.end());
  std::size_t first = 0;
  while (err[first] != best) ++first;
  std::size_t last = first;
  while (last + 1 < err.size() && err[last + 1] == best) ++last;

  const std::size_t mid = first + (last - first) / 2;
  ThresholdFit fit{cand[mid], best};
  if ((last - first) % 2 == 1) {
    const double avg = 0.5 * (cand[mid] + cand[mid + 1]);
    if (threshold_errors(below, above, avg) == best) fit.threshold = avg;
  }
  return fit;
}

}  // namespace rram

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace patentlens::store {

/// Inclusive linear interpolation between order statistics: position
/// p * (n - 1) in the ascending sample. `sorted` must be ascending, non-empty.
double percentile_linear(std::span<const double> sorted, double p);

struct GrantLagStats {
  std::string group_key;
  std::size_t n = 0;
  double mean_days = 0;
  double median_days = 0;
  double p10_days = 0;
  double p90_days = 0;
};

/// Summary of one group's lags; `lags` is sorted in place. Requires n >= 1.
GrantLagStats summarize_lags(std::string group_key, std::vector<double> lags);

}  // namespace patentlens::store

#include "patentlens/store/stats.hpp"

#include <algorithm>
#include <cmath>

#include "patentlens/error.hpp"

namespace patentlens::store {

double percentile_linear(std::span<const double> sorted, double p) {
  if (sorted.empty()) fail(Errc::invalid_argument, "percentile of empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

GrantLagStats summarize_lags(std::string group_key, std::vector<double> lags) {
  std::sort(lags.begin(), lags.end());
  GrantLagStats s;
  s.group_key = std::move(group_key);
  s.n = lags.size();
  double sum = 0;
  for (double v : lags) sum += v;
  s.mean_days = sum / static_cast<double>(s.n);
  s.median_days = percentile_linear(lags, 0.5);
  s.p10_days = percentile_linear(lags, 0.1);
  s.p90_days = percentile_linear(lags, 0.9);
  return s;
}

}  // namespace patentlens::store

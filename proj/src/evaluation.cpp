#include "countcast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace countcast {

namespace {

double sample_median(std::vector<long> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n % 2 == 1) return static_cast<double>(v[n / 2]);
  return 0.5 * (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2]));
}

double weighted_inverse_median(const std::vector<long>& samples) {
  // Median of g(y) proportional to f(y)/y, estimated by 1/y-weighted samples.
  std::vector<long> positive;
  positive.reserve(samples.size());
  for (long v : samples) {
    if (v > 0) positive.push_back(v);
  }
  if (positive.empty()) {
    throw std::domain_error("(-1)-median undefined: no positive samples");
  }
  std::sort(positive.begin(), positive.end());
  double total = 0.0;
  for (long v : positive) total += 1.0 / static_cast<double>(v);
  double half = 0.5 * total;
  double cum = 0.0;
  for (long v : positive) {
    cum += 1.0 / static_cast<double>(v);
    if (cum >= half) return static_cast<double>(v);
  }
  return static_cast<double>(positive.back());
}

}  // namespace

double point_forecast(const std::vector<long>& samples, PointRule rule) {
  if (samples.empty()) throw std::invalid_argument("point_forecast: no samples");
  switch (rule) {
    case PointRule::Median:
      return sample_median(samples);
    case PointRule::Neg1Median:
      return weighted_inverse_median(samples);
    case PointRule::Mean:
      return std::accumulate(samples.begin(), samples.end(), 0.0) /
             static_cast<double>(samples.size());
  }
  throw std::logic_error("unreachable");
}

MetricTable mad(const std::vector<ForecastRecord>& records, int max_horizon, PointRule rule) {
  MetricTable out;
  out.metric = "mad";
  out.by_horizon.assign(max_horizon, 0.0);
  std::vector<long> counts(max_horizon, 0);
  for (const auto& r : records) {
    if (r.horizon < 1 || r.horizon > max_horizon) continue;
    double f = point_forecast(r.samples, rule);
    out.by_horizon[r.horizon - 1] += std::abs(static_cast<double>(r.realized) - f);
    counts[r.horizon - 1] += 1;
  }
  for (int h = 0; h < max_horizon; ++h) {
    if (counts[h] == 0) throw std::invalid_argument("mad: no records at some horizon");
    out.by_horizon[h] /= static_cast<double>(counts[h]);
  }
  return out;
}

MetricTable mape(const std::vector<ForecastRecord>& records, int max_horizon, PointRule rule) {
  MetricTable out;
  out.metric = "mape";
  out.by_horizon.assign(max_horizon, 0.0);
  out.excluded_days.assign(max_horizon, 0);
  std::vector<long> counts(max_horizon, 0);
  for (const auto& r : records) {
    if (r.horizon < 1 || r.horizon > max_horizon) continue;
    if (r.realized == 0) {
      out.excluded_days[r.horizon - 1] += 1;
      continue;
    }
    double f = point_forecast(r.samples, rule);
    out.by_horizon[r.horizon - 1] +=
        std::abs(static_cast<double>(r.realized) - f) / static_cast<double>(r.realized);
    counts[r.horizon - 1] += 1;
  }
  for (int h = 0; h < max_horizon; ++h) {
    if (counts[h] == 0) {
      throw std::domain_error("mape: every day excluded at some horizon");
    }
    out.by_horizon[h] /= static_cast<double>(counts[h]);
  }
  return out;
}

std::pair<long, long> hpd_interval(const std::vector<long>& samples, double level) {
  if (samples.empty()) throw std::invalid_argument("hpd_interval: no samples");
  if (!(level > 0.0 && level <= 1.0)) throw std::invalid_argument("hpd_interval: bad level");
  long lo = *std::min_element(samples.begin(), samples.end());
  long hi = *std::max_element(samples.begin(), samples.end());
  std::size_t span = static_cast<std::size_t>(hi - lo) + 1;
  std::vector<long> hist(span, 0);
  for (long v : samples) hist[static_cast<std::size_t>(v - lo)] += 1;

  // Tiny slack so an exactly-attained mass (e.g. 450/500 at level 0.9) counts.
  const double need = level * static_cast<double>(samples.size()) - 1e-9;
  // Shortest window with mass >= need; among equals, the lowest start.
  std::size_t best_start = 0, best_len = span;
  long mass = 0;
  std::size_t left = 0;
  for (std::size_t right = 0; right < span; ++right) {
    mass += hist[right];
    while (static_cast<double>(mass - hist[left]) >= need && left < right) {
      mass -= hist[left];
      ++left;
    }
    if (static_cast<double>(mass) >= need) {
      std::size_t len = right - left + 1;
      if (len < best_len) {
        best_len = len;
        best_start = left;
      }
    }
  }
  return {lo + static_cast<long>(best_start), lo + static_cast<long>(best_start + best_len - 1)};
}

CoverageTable coverage(const std::vector<ForecastRecord>& records, int max_horizon,
                       const std::vector<double>& levels) {
  for (double lv : levels) {
    if (!(lv > 0.0 && lv <= 1.0)) throw std::invalid_argument("coverage: level outside (0,1]");
  }
  CoverageTable out;
  out.levels = levels;
  out.by_horizon_level.assign(max_horizon, std::vector<double>(levels.size(), 0.0));
  out.records_per_horizon.assign(max_horizon, 0);
  for (const auto& r : records) {
    if (r.horizon < 1 || r.horizon > max_horizon) continue;
    out.records_per_horizon[r.horizon - 1] += 1;
    for (std::size_t li = 0; li < levels.size(); ++li) {
      auto [lo, hi] = hpd_interval(r.samples, levels[li]);
      if (r.realized >= lo && r.realized <= hi) out.by_horizon_level[r.horizon - 1][li] += 1.0;
    }
  }
  for (int h = 0; h < max_horizon; ++h) {
    if (out.records_per_horizon[h] == 0) continue;
    for (double& v : out.by_horizon_level[h]) v /= static_cast<double>(out.records_per_horizon[h]);
  }
  return out;
}

double randomized_pit(const ForecastRecord& record, RngStream& rng) {
  if (record.samples.empty()) throw std::invalid_argument("randomized_pit: no samples");
  double n = static_cast<double>(record.samples.size());
  long below = 0, at_or_below = 0;
  for (long v : record.samples) {
    if (v <= record.realized - 1) ++below;
    if (v <= record.realized) ++at_or_below;
  }
  double lo = static_cast<double>(below) / n;
  double hi = static_cast<double>(at_or_below) / n;
  return lo + rng.uniform() * (hi - lo);
}

}  // namespace countcast

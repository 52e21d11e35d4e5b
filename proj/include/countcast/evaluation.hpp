#pragma once

#include <string>
#include <utility>
#include <vector>

#include "countcast/rng.hpp"

namespace countcast {

// One scored forecast: Monte Carlo samples of y at (origin, horizon) plus the
// realized outcome.
struct ForecastRecord {
  long origin = 0;
  int horizon = 1;  // 1-based steps ahead
  std::vector<long> samples;
  long realized = 0;
};

enum class PointRule { Median, Neg1Median, Mean };

// Median, mean, or the (-1)-median: the 1/y-weighted median over positive
// samples, optimal under absolute percentage error. Throws when Neg1Median
// sees no positive sample.
double point_forecast(const std::vector<long>& samples, PointRule rule);

struct MetricTable {
  std::string metric;
  std::string model;
  std::string rho;
  std::vector<double> by_horizon;     // index 0 = 1 step ahead
  std::vector<long> excluded_days;   // MAPE only: zero-actual exclusions
};

MetricTable mad(const std::vector<ForecastRecord>& records, int max_horizon,
                PointRule rule = PointRule::Median);

// Zero actuals are excluded and counted; throws if a horizon loses every day.
MetricTable mape(const std::vector<ForecastRecord>& records, int max_horizon,
                 PointRule rule = PointRule::Neg1Median);

// Shortest contiguous integer interval holding at least `level` of the sample
// mass; ties broken toward lower values.
std::pair<long, long> hpd_interval(const std::vector<long>& samples, double level);

// Empirical coverage of HPD intervals, per horizon and nominal level.
struct CoverageTable {
  std::vector<double> levels;
  std::vector<std::vector<double>> by_horizon_level;  // [horizon-1][level index]
  std::vector<long> records_per_horizon;
};

CoverageTable coverage(const std::vector<ForecastRecord>& records, int max_horizon,
                       const std::vector<double>& levels);

// Uniform draw on [P(y-1), P(y)] under the discrete sample cdf, with P(-1) = 0.
double randomized_pit(const ForecastRecord& record, RngStream& rng);

}  // namespace countcast

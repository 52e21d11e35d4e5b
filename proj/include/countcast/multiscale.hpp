#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "countcast/dglm.hpp"

namespace countcast {

// Simulated common-factor futures: one row per Monte Carlo path, one column
// per day ahead. Immutable once built; shared read-only across item workers.
struct FactorPaths {
  Eigen::MatrixXd phi;  // n_paths x horizon

  int n_paths() const { return static_cast<int>(phi.rows()); }
  int horizon() const { return static_cast<int>(phi.cols()); }
};

// Names the covariate column that receives per-path factor values during
// forecast simulation.
struct FactorBinding {
  const FactorPaths* paths = nullptr;
  std::string column = "factor";
};

// Normal DLM on log aggregate transactions: local linear trend, scaled
// log-average-price regressor, weekly and yearly Fourier components. The
// weekly component's fitted value is the day-of-week factor consumed by
// item-level models.
class AggregateModel {
 public:
  // price_mean/price_sd standardize log average price into the regressor.
  AggregateModel(Dglm dlm, double price_mean, double price_sd);

  const Dglm& dlm() const { return dlm_; }
  long zero_total_days() const { return zero_total_days_; }

  // One filtering day on log(total). Zero totals are guarded by log(total+1)
  // and counted; aggregates of a whole category essentially never hit this.
  void update(long total_transactions, double avg_price);

  // Posterior-mean weekly effect for the next day (after evolution), used as
  // the plug-in regressor when filtering item models.
  double next_day_factor_mean(double avg_price) const;

  // Compositional simulation of the aggregate k days ahead: Student-t
  // predictive draw, condition, evolve; the factor is the weekly Fourier
  // component's contribution on each day.
  FactorPaths simulate_factor_paths(int horizon, const std::vector<double>& future_avg_price,
                                    int n_paths, RngStream& rng) const;

  Covariates covariates_for(double avg_price) const;

 private:
  double weekly_contribution(const StateMoments& s) const;

  Dglm dlm_;
  double price_mean_;
  double price_sd_;
  long zero_total_days_ = 0;
  std::vector<int> weekly_coords_;  // state indices of the period-7 blocks' leads
};

// Writes phi as delimited text (one row per path) for audit.
void write_factor_paths(const FactorPaths& paths, const std::string& path);

}  // namespace countcast

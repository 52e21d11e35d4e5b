#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "countcast/dbcm.hpp"

namespace countcast {

// Experiment layout and model defaults. The config file is `key = value`
// lines with `#` comments and dotted hierarchical keys; CLI flags override.
struct ExperimentConfig {
  // Period layout, in days from the start of the data.
  int training_days = 21;   // prior construction window
  int fit_days = 365;       // filtering before the first forecast origin
  int forecast_days = 322;  // rolling forecast origins
  int horizon = 14;
  int paths = 500;

  std::vector<double> rho_grid = {0.2, 0.4, 0.6, 0.8, 1.0};
  double rho_binary = 1.0;

  int cascade_depth = 4;
  ExcessMode excess_mode = ExcessMode::Empirical;
  bool cascade_prior_literal = false;  // use the within-level non-exceedance proportion

  bool run_benchmark = true;   // DCMM on sales
  bool run_independent = true; // independent DBCM
  bool run_multiscale = true;  // multi-scale DBCM

  // Discount defaults.
  double discount_poisson = 0.99;
  double discount_bernoulli = 0.999;
  double discount_cascade_level = 0.999;
  double discount_cascade_promo = 1.0;
  double discount_agg_trend = 0.995;
  double discount_agg_regression = 0.995;
  double discount_agg_seasonal = 0.999;
  double volatility_discount = 0.999;

  int weekly_harmonics = 3;
  int yearly_harmonics = 2;
  double loading_prior_mean = 1.0;
  double loading_prior_var = 1.0;

  std::vector<double> coverage_levels = {0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.9, 0.95};

  std::uint64_t seed = 20230501;
  int threads = 0;  // 0: hardware concurrency
  bool emit_samples = false;
  std::vector<std::string> items;  // empty: all items

  // Conjugate solver controls, applied process-wide before any filtering.
  int solver_max_iter = 100;
  double solver_tol = 1e-8;

  std::string future_covariates_file;  // optional supplied future price/promo

  void validate() const;
};

// Parse `key = value` text. Unknown keys raise std::invalid_argument naming
// the key and line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Applies one key (same grammar as the file) onto an existing config.
void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

std::string describe_config(const ExperimentConfig& cfg);  // canonical echo, for manifests

}  // namespace countcast

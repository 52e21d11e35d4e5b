#pragma once

#include <string>
#include <vector>

#include "countcast/ingest.hpp"
#include "countcast/rng.hpp"

namespace countcast {

// Generative scenario for the full transactions/cascade stack. Latent levels
// follow slowly mean-reverting walks; weekly patterns are zero-mean 7-day
// shapes, shared across items (with per-item loadings) when shared_weekly.
struct ScenarioConfig {
  int n_items = 1;
  int days = 762;
  int cascade_depth = 4;
  int start_date = 19358;  // 2023-01-01

  double logit_pi = 3.5;            // zero/non-zero transactions level
  double log_mu = 3.06;             // conditional transaction level (log scale)
  double weekly_amplitude = 0.12;   // sd of the weekly shape on log mu
  bool shared_weekly = false;
  double loading_spread = 0.3;      // per-item loading ~ U[1 +/- spread]
  double level_ar = 0.99;           // AR(1) pull of latent levels
  double level_walk_sd = 0.008;

  double price_base = 1.25;
  double price_jitter_sd = 0.05;    // log-scale repricing noise
  int price_block_days = 28;
  double promo_start_rate = 0.02;   // per-day hazard of a promo episode
  int promo_min_days = 3;
  int promo_max_days = 7;
  double promo_discount = 0.85;     // price multiplier on promotion
  double promo_coef_count = 0.35;   // log mu lift on promotion
  double promo_coef_binary = 0.5;
  double price_coef_count = -0.8;   // per unit log price deviation

  std::vector<double> cascade_pi = {0.30, 0.30, 0.35, 0.35};
  double cascade_promo_coef = 0.4;
  double excess_continue = 0.45;    // tail geometric continuation past d+1
  int excess_cap = 40;              // largest basket size generated
};

// Targets the published data profile: daily transaction mean near 22.8 and
// at least ~98% of baskets at four units or fewer.
ScenarioConfig item_a_scenario();

// Five low-volume items sharing one strong weekly pattern; the setting where
// cross-item factor sharing should pay.
ScenarioConfig shared_factor_scenario(int n_items = 5, int days = 180);

struct ItemTruth {
  std::string item_id;
  double loading = 1.0;
  std::vector<double> weekly;        // 7 zero-mean values
  std::vector<double> cascade_logit; // logit pi_r
  std::vector<double> pi;            // per day
  std::vector<double> mu;            // per day, conditional Poisson mean
  std::vector<long> transactions;    // realized b
  std::vector<long> sales;           // realized y
};

struct SyntheticOutput {
  std::vector<TransactionRow> rows;  // sorted by date, then item
  std::vector<ItemTruth> truth;
  std::string truth_json() const;
};

SyntheticOutput generate_synthetic(const ScenarioConfig& scenario, RngStream rng);

}  // namespace countcast

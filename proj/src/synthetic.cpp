#include "countcast/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "countcast/distributions.hpp"
#include "json.hpp"

namespace countcast {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> draw_weekly_shape(RngStream& rng, double amplitude) {
  std::vector<double> shape(7);
  double mean = 0.0;
  for (double& v : shape) {
    v = draw_normal(rng, 0.0, 1.0);
    mean += v;
  }
  mean /= 7.0;
  double ss = 0.0;
  for (double& v : shape) {
    v -= mean;
    ss += v * v;
  }
  double sd = std::sqrt(ss / 7.0);
  for (double& v : shape) v *= amplitude / (sd > 0 ? sd : 1.0);
  return shape;
}

long draw_basket_size(RngStream& rng, const std::vector<double>& exceed_prob,
                      double excess_continue, int cap) {
  long size = 1;
  const int d = static_cast<int>(exceed_prob.size());
  for (int r = 0; r < d; ++r) {
    if (!draw_bernoulli(rng, exceed_prob[r])) return size;
    size = r + 2;
  }
  // Beyond the cascade depth: geometric tail.
  while (size < cap && draw_bernoulli(rng, excess_continue)) ++size;
  return size;
}

}  // namespace

ScenarioConfig item_a_scenario() {
  ScenarioConfig s;
  s.n_items = 1;
  s.days = 762;
  s.logit_pi = 3.6;        // ~97% of days see transactions
  s.log_mu = std::log(21.9);
  s.weekly_amplitude = 0.12;
  return s;
}

ScenarioConfig shared_factor_scenario(int n_items, int days) {
  ScenarioConfig s;
  s.n_items = n_items;
  s.days = days;
  s.shared_weekly = true;
  s.logit_pi = 2.0;
  s.log_mu = std::log(3.0);
  s.weekly_amplitude = 0.35;
  s.loading_spread = 0.3;
  s.level_walk_sd = 0.006;
  return s;
}

SyntheticOutput generate_synthetic(const ScenarioConfig& scenario, RngStream rng) {
  if (scenario.n_items < 1 || scenario.days < 1) {
    throw std::invalid_argument("scenario: need at least one item and one day");
  }
  const int d = scenario.cascade_depth;
  if (static_cast<int>(scenario.cascade_pi.size()) != d) {
    throw std::invalid_argument("scenario: cascade_pi length must equal depth");
  }

  SyntheticOutput out;
  std::vector<double> shared_weekly;
  if (scenario.shared_weekly) {
    RngStream shape_rng = rng.substream(0x5ea5);
    shared_weekly = draw_weekly_shape(shape_rng, scenario.weekly_amplitude);
  }

  for (int i = 0; i < scenario.n_items; ++i) {
    RngStream item_rng = rng.substream(100 + static_cast<std::uint64_t>(i));
    ItemTruth truth;
    {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "item%03d", i);
      truth.item_id = buf;
    }
    truth.weekly = scenario.shared_weekly
                       ? shared_weekly
                       : draw_weekly_shape(item_rng, scenario.weekly_amplitude);
    truth.loading = scenario.shared_weekly
                        ? 1.0 + scenario.loading_spread * (2.0 * item_rng.uniform() - 1.0)
                        : 1.0;
    for (double p : scenario.cascade_pi) truth.cascade_logit.push_back(std::log(p / (1 - p)));

    double level_pi = scenario.logit_pi;
    double level_mu = scenario.log_mu;
    double log_price = std::log(scenario.price_base);
    int promo_left = 0;
    int days_since_reprice = 0;

    for (int t = 0; t < scenario.days; ++t) {
      int date = scenario.start_date + t;
      int dow = ((date % 7) + 7) % 7;

      if (days_since_reprice >= scenario.price_block_days) {
        log_price = std::log(scenario.price_base) +
                    draw_normal(item_rng, 0.0, scenario.price_jitter_sd * scenario.price_jitter_sd);
        days_since_reprice = 0;
      }
      ++days_since_reprice;
      if (promo_left == 0 && draw_bernoulli(item_rng, scenario.promo_start_rate)) {
        promo_left = scenario.promo_min_days +
                     static_cast<int>(item_rng.uniform() *
                                      (scenario.promo_max_days - scenario.promo_min_days + 1));
      }
      bool promo = promo_left > 0;
      if (promo_left > 0) --promo_left;
      double price = std::exp(log_price) * (promo ? scenario.promo_discount : 1.0);

      // Mean-reverting latent levels.
      level_pi = scenario.logit_pi + scenario.level_ar * (level_pi - scenario.logit_pi) +
                 draw_normal(item_rng, 0.0, scenario.level_walk_sd * scenario.level_walk_sd);
      level_mu = scenario.log_mu + scenario.level_ar * (level_mu - scenario.log_mu) +
                 draw_normal(item_rng, 0.0, scenario.level_walk_sd * scenario.level_walk_sd);

      double seasonal = truth.loading * truth.weekly[dow];
      double pi = logistic(level_pi + 0.5 * seasonal +
                           (promo ? scenario.promo_coef_binary : 0.0));
      double mu = std::exp(level_mu + seasonal + (promo ? scenario.promo_coef_count : 0.0) +
                           scenario.price_coef_count * (std::log(price) - std::log(scenario.price_base)));

      long b = 0;
      if (draw_bernoulli(item_rng, pi)) b = 1 + draw_poisson(item_rng, mu);

      std::vector<double> exceed(d);
      for (int r = 0; r < d; ++r) {
        exceed[r] = logistic(truth.cascade_logit[r] + (promo ? scenario.cascade_promo_coef : 0.0));
      }
      long y = 0;
      for (long tr = 0; tr < b; ++tr) {
        long size = draw_basket_size(item_rng, exceed, scenario.excess_continue,
                                     scenario.excess_cap);
        y += size;
        TransactionRow row;
        row.date = date;
        row.item_id = truth.item_id;
        row.price = price;
        row.promo = promo;
        row.units = size;
        out.rows.push_back(row);
      }

      truth.pi.push_back(pi);
      truth.mu.push_back(mu);
      truth.transactions.push_back(b);
      truth.sales.push_back(y);
    }
    out.truth.push_back(std::move(truth));
  }

  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const TransactionRow& a, const TransactionRow& b) {
                     if (a.date != b.date) return a.date < b.date;
                     return a.item_id < b.item_id;
                   });
  return out;
}

std::string SyntheticOutput::truth_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& item : truth) {
    nlohmann::json ji;
    ji["item_id"] = item.item_id;
    ji["loading"] = item.loading;
    ji["weekly"] = item.weekly;
    ji["cascade_logit"] = item.cascade_logit;
    ji["pi"] = item.pi;
    ji["mu"] = item.mu;
    ji["transactions"] = item.transactions;
    ji["sales"] = item.sales;
    j.push_back(std::move(ji));
  }
  return j.dump();
}

}  // namespace countcast

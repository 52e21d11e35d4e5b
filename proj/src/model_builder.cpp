#include "countcast/model_builder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace countcast {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPriorVarCap = 4.0;
constexpr double kResidualVarFloor = 0.01;

double logit(double p) { return std::log(p / (1.0 - p)); }

struct ReferenceFit {
  Eigen::VectorXd coef;
  Eigen::MatrixXd cov;
  double sigma2 = kResidualVarFloor;
  double dof = 1.0;
};

// Ridge-stabilized least squares; the covariance is eigenvalue-capped so
// unidentified directions get a wide-but-proper prior instead of blowing up.
ReferenceFit reference_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  Eigen::MatrixXd xtx = X.transpose() * X;
  double ridge = std::max(1e-8, 1e-8 * xtx.trace() / p);
  xtx.diagonal().array() += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(xtx);
  ReferenceFit fit;
  fit.coef = llt.solve(X.transpose() * y);
  double rss = (y - X * fit.coef).squaredNorm();
  fit.dof = std::max(1.0, static_cast<double>(n - p));
  fit.sigma2 = std::max(rss / fit.dof, kResidualVarFloor);
  Eigen::MatrixXd cov = fit.sigma2 * llt.solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(((cov + cov.transpose()) * 0.5).eval());
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(1e-8).cwiseMin(kPriorVarCap);
  fit.cov = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  return fit;
}

long target_count(const DailyItemRecord& day, DcmmTarget target) {
  return target == DcmmTarget::Transactions ? day.decomposition.b : day.decomposition.y;
}

// Centered day-of-week effects of log totals over the training window; the
// stand-in for the aggregate weekly factor when setting loading priors.
std::vector<double> proxy_factor(const AggregateSeries& agg, int training_days) {
  std::vector<double> dow_sum(7, 0.0);
  std::vector<long> dow_n(7, 0);
  double total_mean = 0.0;
  for (int t = 0; t < training_days; ++t) {
    double lt = std::log(static_cast<double>(std::max<long>(agg.total_transactions[t], 1)));
    dow_sum[(agg.start_date + t) % 7] += lt;
    dow_n[(agg.start_date + t) % 7] += 1;
    total_mean += lt;
  }
  total_mean /= training_days;
  std::vector<double> phi(training_days, 0.0);
  for (int t = 0; t < training_days; ++t) {
    int dow = (agg.start_date + t) % 7;
    phi[t] = dow_n[dow] > 0 ? dow_sum[dow] / dow_n[dow] - total_mean : 0.0;
  }
  return phi;
}

}  // namespace

double clipped_proportion(long active, long total) {
  if (total < 1) throw std::invalid_argument("clipped_proportion: empty window");
  double n = static_cast<double>(total);
  double lo = 1.0 / (n + 2.0);
  return std::clamp(static_cast<double>(active) / n, lo, 1.0 - lo);
}

Covariates day_covariates(const DailyItemRecord& day) {
  Covariates cov;
  cov.set("log_price", day.log_price);
  cov.set("promo", day.promo ? 1.0 : 0.0);
  return cov;
}

DglmSpec make_item_spec(Family family, const ExperimentConfig& cfg, double rho,
                        bool with_factor) {
  DglmSpec spec;
  spec.family = family;
  spec.rho = rho;
  double delta = family == Family::BinomialLogistic ? cfg.discount_bernoulli
                                                    : cfg.discount_poisson;
  spec.layout.push_back({"level", ComponentKind::Intercept, "", 0, 0, 0});
  spec.layout.push_back({"price", ComponentKind::Covariate, "log_price", 0, 0, 1});
  spec.layout.push_back({"promo", ComponentKind::Covariate, "promo", 0, 0, 2});
  if (with_factor) {
    spec.layout.push_back({"loading", ComponentKind::Covariate, "factor", 0, 0, 3});
    spec.discounts = {{0, delta}, {1, delta}, {2, delta}, {3, delta}};
  } else {
    for (int j = 1; j <= cfg.weekly_harmonics; ++j) {
      spec.layout.push_back({"seasonal7", ComponentKind::Fourier, "", 7, j, 3});
    }
    spec.discounts = {{0, delta}, {1, delta}, {2, delta}, {3, delta}};
  }
  return spec;
}

DglmSpec make_cascade_level_spec(const ExperimentConfig& cfg) {
  DglmSpec spec;
  spec.family = Family::BinomialLogistic;
  spec.rho = 1.0;
  spec.layout.push_back({"level", ComponentKind::Intercept, "", 0, 0, 0});
  spec.layout.push_back({"promo", ComponentKind::Covariate, "promo", 0, 0, 1});
  spec.discounts = {{0, cfg.discount_cascade_level}, {1, cfg.discount_cascade_promo}};
  return spec;
}

DglmSpec make_aggregate_spec(const ExperimentConfig& cfg) {
  DglmSpec spec;
  spec.family = Family::Normal;
  spec.rho = 1.0;
  spec.volatility_discount = cfg.volatility_discount;
  spec.layout.push_back({"trend", ComponentKind::LinearTrend, "", 0, 0, 0});
  spec.layout.push_back({"price", ComponentKind::Covariate, "agg_price", 0, 0, 1});
  for (int j = 1; j <= cfg.weekly_harmonics; ++j) {
    spec.layout.push_back({"seasonal7", ComponentKind::Fourier, "", 7, j, 2});
  }
  for (int j = 1; j <= cfg.yearly_harmonics; ++j) {
    spec.layout.push_back({"seasonal365", ComponentKind::Fourier, "", 365, j, 3});
  }
  spec.discounts = {{0, cfg.discount_agg_trend},
                    {1, cfg.discount_agg_regression},
                    {2, cfg.discount_agg_seasonal},
                    {3, cfg.discount_agg_seasonal}};
  return spec;
}

DcmmModel build_dcmm(const ItemSeries& item, const ExperimentConfig& cfg, DcmmTarget target,
                     double rho, bool with_factor, const AggregateSeries* aggregate) {
  const int train = cfg.training_days;
  if (static_cast<int>(item.days.size()) < train) {
    throw std::invalid_argument("build_dcmm: training slice shorter than " +
                                std::to_string(train) + " days");
  }
  if (with_factor && aggregate == nullptr) {
    throw std::invalid_argument("build_dcmm: factor-bound spec needs the aggregate series");
  }

  DglmSpec bin_spec = make_item_spec(Family::BinomialLogistic, cfg, cfg.rho_binary, with_factor);
  DglmSpec cnt_spec = make_item_spec(Family::PoissonLoglinear, cfg, rho, with_factor);

  // Binary prior: level at logit of the clipped active proportion, all other
  // means zero, identity covariance.
  long active = 0;
  for (int t = 0; t < train; ++t) active += target_count(item.days[t], target) > 0 ? 1 : 0;
  StateMoments bin_prior;
  bin_prior.m = Eigen::VectorXd::Zero(bin_spec.state_dim());
  bin_prior.m(0) = logit(clipped_proportion(active, train));
  bin_prior.C = Eigen::MatrixXd::Identity(bin_spec.state_dim(), bin_spec.state_dim());

  // Poisson prior: reference analysis of log(1 + x) on active training days.
  std::vector<double> phi;
  if (with_factor) phi = proxy_factor(*aggregate, train);
  std::vector<int> active_days;
  for (int t = 0; t < train; ++t) {
    if (target_count(item.days[t], target) > 0) active_days.push_back(t);
  }
  const int p = cnt_spec.state_dim();
  StateMoments cnt_prior;
  if (active_days.empty()) {
    // Never-active item: diffuse prior around a small rate.
    cnt_prior.m = Eigen::VectorXd::Zero(p);
    cnt_prior.C = Eigen::MatrixXd::Identity(p, p);
  } else {
    Eigen::MatrixXd X(active_days.size(), p);
    Eigen::VectorXd w(active_days.size());
    for (std::size_t i = 0; i < active_days.size(); ++i) {
      int t = active_days[i];
      Covariates cov = day_covariates(item.days[t]);
      if (with_factor) cov.set("factor", phi[t]);
      Eigen::VectorXd F = cnt_spec.regression_vector(cov);
      if (!with_factor) {
        // Fourier coordinates rotate; phase the design so the fitted state
        // applies at the first post-training day.
        int at = 3;
        int u = t - train;
        for (int j = 1; j <= cfg.weekly_harmonics; ++j) {
          double wj = 2.0 * kPi * j / 7.0;
          F(at) = std::cos(wj * u);
          F(at + 1) = std::sin(wj * u);
          at += 2;
        }
      }
      X.row(i) = F.transpose();
      w(i) = std::log(1.0 + static_cast<double>(target_count(item.days[t], target) - 1));
    }
    ReferenceFit fit = reference_ols(X, w);
    cnt_prior.m = fit.coef;
    cnt_prior.C = fit.cov;
  }

  return DcmmModel(Dglm(bin_spec, std::move(bin_prior)),
                   Dglm(cnt_spec, std::move(cnt_prior)));
}

CascadeModel build_cascade(const ItemSeries& item, const ExperimentConfig& cfg) {
  const int train = cfg.training_days;
  const int d = cfg.cascade_depth;
  if (static_cast<int>(item.days.size()) < train) {
    throw std::invalid_argument("build_cascade: training slice shorter than " +
                                std::to_string(train) + " days");
  }
  DglmSpec level_spec = make_cascade_level_spec(cfg);
  std::vector<Dglm> levels;
  levels.reserve(d);
  for (int r = 1; r <= d; ++r) {
    long trials = 0, exceed = 0;
    for (int t = 0; t < train; ++t) {
      const DayDecomposition& dec = item.days[t].decomposition;
      trials += (r == 1) ? dec.b : dec.n[r - 2];
      exceed += dec.n[r - 1];
    }
    // Laplace-smoothed exceedance proportion; the literal switch uses the
    // complementary within-level proportion instead.
    double p_exceed = (static_cast<double>(exceed) + 1.0) / (static_cast<double>(trials) + 2.0);
    double p_mean = cfg.cascade_prior_literal ? 1.0 - p_exceed : p_exceed;
    StateMoments prior;
    prior.m = Eigen::VectorXd::Zero(level_spec.state_dim());
    prior.m(0) = logit(p_mean);
    prior.C = 0.1 * Eigen::MatrixXd::Identity(level_spec.state_dim(), level_spec.state_dim());
    levels.emplace_back(level_spec, std::move(prior));
  }
  ExcessStore store;
  if (cfg.excess_mode == ExcessMode::Empirical) {
    // The training window is past data: seed the store with its excesses.
    for (int t = 0; t < train; ++t) {
      for (long size : item.days[t].decomposition.excess_sizes) store.add(size);
    }
  }
  return CascadeModel(std::move(levels), cfg.excess_mode, std::move(store));
}

AggregateModel build_aggregate(const AggregateSeries& aggregate, const ExperimentConfig& cfg) {
  const int train = cfg.training_days;
  if (static_cast<int>(aggregate.total_transactions.size()) < train) {
    throw std::invalid_argument("build_aggregate: training slice too short");
  }
  DglmSpec spec = make_aggregate_spec(cfg);

  double price_mean = 0.0, price_var = 0.0;
  for (int t = 0; t < train; ++t) price_mean += std::log(aggregate.avg_price[t]);
  price_mean /= train;
  for (int t = 0; t < train; ++t) {
    double dev = std::log(aggregate.avg_price[t]) - price_mean;
    price_var += dev * dev;
  }
  double price_sd = std::sqrt(price_var / std::max(1, train - 1));
  if (!(price_sd > 1e-12)) price_sd = 1.0;

  const int p = spec.state_dim();
  Eigen::MatrixXd X(train, p);
  Eigen::VectorXd w(train);
  for (int t = 0; t < train; ++t) {
    int u = t - train;  // state applies at the first post-training day
    Eigen::VectorXd F = Eigen::VectorXd::Zero(p);
    F(0) = 1.0;
    F(1) = static_cast<double>(u);
    F(2) = (std::log(aggregate.avg_price[t]) - price_mean) / price_sd;
    int at = 3;
    for (const auto& c : spec.layout) {
      if (c.kind != ComponentKind::Fourier) continue;
      double wj = 2.0 * kPi * c.harmonic / c.period;
      F(at) = std::cos(wj * u);
      F(at + 1) = std::sin(wj * u);
      at += 2;
    }
    X.row(t) = F.transpose();
    w(t) = std::log(static_cast<double>(std::max<long>(aggregate.total_transactions[t], 1)));
  }
  ReferenceFit fit = reference_ols(X, w);
  StateMoments prior{fit.coef, fit.cov};
  VolatilityState vol{fit.dof, fit.sigma2};
  return AggregateModel(Dglm(spec, std::move(prior), vol), price_mean, price_sd);
}

}  // namespace countcast

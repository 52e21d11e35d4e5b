#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "countcast/dcmm.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace countcast;

namespace {

DglmSpec level_spec(Family family, double delta, double rho = 1.0) {
  DglmSpec spec;
  spec.family = family;
  spec.rho = rho;
  spec.layout.push_back({"level", ComponentKind::Intercept, "", 0, 0, 0});
  spec.discounts = {{0, delta}};
  return spec;
}

StateMoments scalar_state(double m, double c) {
  StateMoments s;
  s.m = Eigen::VectorXd::Constant(1, m);
  s.C = Eigen::MatrixXd::Constant(1, 1, c);
  return s;
}

DcmmModel make_model(double bin_mean, double bin_var, double cnt_mean, double cnt_var,
                     double delta = 1.0, double rho = 1.0) {
  Dglm binary(level_spec(Family::BinomialLogistic, delta), scalar_state(bin_mean, bin_var));
  Dglm count(level_spec(Family::PoissonLoglinear, delta, rho), scalar_state(cnt_mean, cnt_var));
  return DcmmModel(std::move(binary), std::move(count));
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("family checks on construction") {
  Dglm pois(level_spec(Family::PoissonLoglinear, 1.0), scalar_state(0, 1));
  Dglm bin(level_spec(Family::BinomialLogistic, 1.0), scalar_state(0, 1));
  CHECK_THROWS_AS(DcmmModel(pois, pois), std::invalid_argument);
  CHECK_THROWS_AS(DcmmModel(bin, bin), std::invalid_argument);
}

TEST_CASE("filter: zero day carries the count prior, b = 1 observes x = 0") {
  Covariates cov;
  RngStream rng(1, 1);

  auto model = make_model(0.5, 0.8, 1.0, 0.6, 0.9);
  StateMoments expected_count = evolve(model.count().state(), model.count().spec());
  model.filter_step(0, cov, rng);
  CHECK(model.count().state().m == expected_count.m);
  CHECK(model.count().state().C == expected_count.C);

  // b = 1: the count component must see exactly x = 0.
  auto m2 = make_model(0.5, 0.8, 1.0, 0.6, 0.9);
  Dglm manual = m2.count();
  auto step = manual.prepare(cov);
  manual.observe(step, 0.0);
  m2.filter_step(1, cov, rng);
  CHECK(m2.count().state().m == manual.state().m);
  CHECK(m2.count().state().C == manual.state().C);

  CHECK_THROWS_AS(m2.filter_step(-1, cov, rng), std::invalid_argument);
}

TEST_CASE("filter diagnostics: log score matches the mixture by hand") {
  Covariates cov;
  RngStream rng(2, 2);
  auto model = make_model(0.3, 0.5, 0.8, 0.4);

  auto bstep = model.binary().prepare(cov, 1);
  auto cstep = model.count().prepare(cov);
  auto* bb = std::get_if<BetaBinomial>(&bstep.predictive);
  auto* nb = std::get_if<NegativeBinomial>(&cstep.predictive);
  double pi = bb->alpha / (bb->alpha + bb->beta);
  long b = 3;
  double expected = std::log(pi) + log_pmf_negative_binomial(b - 1, nb->alpha, nb->p);

  auto diag = model.filter_step(b, cov, rng);
  CHECK(diag.log_score == doctest::Approx(expected).epsilon(1e-12));
  CHECK(diag.pit >= 0.0);
  CHECK(diag.pit <= 1.0);
}

TEST_CASE("static generator recovery: filtered success probability near truth") {
  const double true_pi = 0.7, true_mu = 4.0;
  auto model = make_model(0.0, 1.0, 0.0, 1.0, 0.999);
  Covariates cov;
  RngStream rng(42, 10);
  RngStream diag_rng(42, 11);
  for (int t = 0; t < 500; ++t) {
    long b = 0;
    if (draw_bernoulli(rng, true_pi)) b = 1 + draw_poisson(rng, true_mu);
    model.filter_step(b, cov, diag_rng);
  }
  auto bstep = model.binary().prepare(cov, 1);
  auto* bb = std::get_if<BetaBinomial>(&bstep.predictive);
  double pi_hat = bb->alpha / (bb->alpha + bb->beta);
  CHECK(std::abs(pi_hat - true_pi) <= 0.05);

  // b = 1 + Po(mu): the shifted component's mean estimate targets mu itself.
  auto cstep = model.count().prepare(cov);
  auto* nb = std::get_if<NegativeBinomial>(&cstep.predictive);
  double mu_hat = nb->alpha * (1.0 - nb->p) / nb->p;
  CHECK(std::abs(mu_hat - true_mu) <= 0.5);
}

TEST_CASE("degenerate binary prior: every path is identically zero") {
  auto model = make_model(-30.0, 0.01, 1.0, 0.5);
  std::vector<Covariates> future(5);
  RngStream rng(3, 3);
  auto paths = model.forecast_transaction_paths(5, future, 2000, rng);
  for (const auto& path : paths) {
    for (int j = 0; j < 5; ++j) {
      CHECK(path.z[j] == 0);
      CHECK(path.b[j] == 0);
    }
  }
}

TEST_CASE("path structure: coupling and shifted support") {
  auto model = make_model(0.2, 0.8, 0.7, 0.5, 0.98);
  std::vector<Covariates> future(7);
  RngStream rng(4, 4);
  auto paths = model.forecast_transaction_paths(7, future, 500, rng);
  REQUIRE(paths.size() == 500);
  for (const auto& path : paths) {
    for (int j = 0; j < 7; ++j) {
      CHECK((path.b[j] == 0) == (path.z[j] == 0));
      if (path.z[j] == 1) CHECK(path.b[j] >= 1);
    }
  }
}

TEST_CASE("forecasting never mutates the filtered model") {
  auto model = make_model(0.4, 0.7, 0.9, 0.6, 0.95, 0.8);
  auto before = model;
  std::vector<Covariates> future(14);
  RngStream rng(5, 5);
  model.forecast_transaction_paths(14, future, 200, rng);
  CHECK(model == before);
}

TEST_CASE("fixed rng reproduces identical path sets; errors on bad input") {
  auto model = make_model(0.4, 0.7, 0.9, 0.6);
  std::vector<Covariates> future(6);
  RngStream r1(6, 6), r2(6, 6);
  auto a = model.forecast_transaction_paths(6, future, 100, r1);
  auto b = model.forecast_transaction_paths(6, future, 100, r2);
  for (std::size_t p = 0; p < a.size(); ++p) {
    CHECK(a[p].z == b[p].z);
    CHECK(a[p].b == b[p].b);
  }
  RngStream r3(6, 6);
  CHECK_THROWS_AS(model.forecast_transaction_paths(6, future, 0, r3), std::invalid_argument);
  CHECK_THROWS_AS(model.forecast_transaction_paths(9, future, 10, r3), std::invalid_argument);
}

TEST_CASE("1-step marginal P(b = 0) matches the matched-prior failure probability") {
  auto model = make_model(0.6, 0.4, 1.2, 0.3);
  Covariates cov;
  auto bstep = model.binary().prepare(cov, 1);
  auto* bb = std::get_if<BetaBinomial>(&bstep.predictive);
  double p_zero = bb->beta / (bb->alpha + bb->beta);

  std::vector<Covariates> future(1);
  RngStream rng(8, 8);
  const int n_paths = 100000;
  auto paths = model.forecast_transaction_paths(1, future, n_paths, rng);
  double zeros = 0.0;
  for (const auto& path : paths) zeros += path.b[0] == 0 ? 1.0 : 0.0;
  double se = std::sqrt(p_zero * (1.0 - p_zero) / n_paths);
  CHECK(std::abs(zeros / n_paths - p_zero) <= 3.0 * se);
}

TEST_CASE("conditional coherence: 1-step empirical mean matches the analytic composition") {
  auto model = make_model(0.8, 0.5, 1.1, 0.4, 1.0, 0.7);
  Covariates cov;
  double analytic = model.one_step_mean(cov);

  std::vector<Covariates> future(1);
  RngStream rng(9, 9);
  const int n_paths = 200000;
  auto paths = model.forecast_transaction_paths(1, future, n_paths, rng);
  double sum = 0.0, sumsq = 0.0;
  for (const auto& path : paths) {
    sum += static_cast<double>(path.b[0]);
    sumsq += static_cast<double>(path.b[0]) * static_cast<double>(path.b[0]);
  }
  double mean = sum / n_paths;
  double var = sumsq / n_paths - mean * mean;
  CHECK(std::abs(mean - analytic) <= 3.0 * std::sqrt(var / n_paths));
}

TEST_CASE("self-calibration: randomized PIT of 1-step forecasts is uniform") {
  // Slowly varying truth filtered by a matching spec.
  auto model = make_model(1.2, 0.25, 1.4, 0.25, 0.97);
  Covariates cov;
  RngStream truth_rng(12, 1);
  RngStream diag_rng(12, 2);
  double level_pi = 1.2, level_mu = 1.4;
  std::vector<double> pits;
  for (int t = 0; t < 420; ++t) {
    level_pi += draw_normal(truth_rng, 0.0, 1e-4);
    level_mu += draw_normal(truth_rng, 0.0, 1e-4);
    long b = 0;
    if (draw_bernoulli(truth_rng, logistic(level_pi))) {
      b = 1 + draw_poisson(truth_rng, std::exp(level_mu));
    }
    auto diag = model.filter_step(b, cov, diag_rng);
    if (t >= 100) pits.push_back(diag.pit);  // burn-in excluded
  }
  REQUIRE(pits.size() >= 300);
  double d = oracles::ks_statistic_uniform(pits);
  CHECK(d < oracles::ks_critical(0.01, pits.size()));
}

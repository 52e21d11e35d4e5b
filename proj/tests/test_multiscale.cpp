#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>

#include "countcast/dcmm.hpp"
#include "countcast/multiscale.hpp"
#include "doctest.h"

using namespace countcast;

namespace {

constexpr double kPi = 3.14159265358979323846;

DglmSpec aggregate_like_spec(double seasonal_delta = 0.999) {
  DglmSpec spec;
  spec.family = Family::Normal;
  spec.volatility_discount = 0.999;
  spec.layout.push_back({"trend", ComponentKind::LinearTrend, "", 0, 0, 0});
  spec.layout.push_back({"price", ComponentKind::Covariate, "agg_price", 0, 0, 1});
  for (int j = 1; j <= 3; ++j) {
    spec.layout.push_back({"seasonal7", ComponentKind::Fourier, "", 7, j, 2});
  }
  spec.discounts = {{0, 0.995}, {1, 0.995}, {2, seasonal_delta}};
  return spec;
}

AggregateModel make_aggregate(double seasonal_delta = 0.999, double seasonal_var = 1.0) {
  DglmSpec spec = aggregate_like_spec(seasonal_delta);
  int p = spec.state_dim();
  StateMoments prior;
  prior.m = Eigen::VectorXd::Zero(p);
  prior.C = Eigen::MatrixXd::Identity(p, p);
  for (int i = 3; i < p; ++i) prior.C(i, i) = seasonal_var;
  return AggregateModel(Dglm(spec, std::move(prior), {5.0, 0.1}), 0.0, 1.0);
}

// Weekly posterior variance: quadratic form over the harmonic lead coords.
double weekly_factor_var(const AggregateModel& agg) {
  const auto& C = agg.dlm().state().C;
  double v = 0.0;
  for (int i : {3, 5, 7}) {
    for (int j : {3, 5, 7}) v += C(i, j);
  }
  return v;
}

}  // namespace

TEST_CASE("aggregate model construction checks") {
  DglmSpec bad = aggregate_like_spec();
  bad.family = Family::PoissonLoglinear;
  StateMoments s;
  s.m = Eigen::VectorXd::Zero(bad.state_dim());
  s.C = Eigen::MatrixXd::Identity(bad.state_dim(), bad.state_dim());
  CHECK_THROWS_AS(AggregateModel(Dglm(bad, s), 0.0, 1.0), std::invalid_argument);

  DglmSpec no_weekly;
  no_weekly.family = Family::Normal;
  no_weekly.layout.push_back({"level", ComponentKind::Intercept, "", 0, 0, 0});
  no_weekly.discounts = {{0, 1.0}};
  StateMoments s2;
  s2.m = Eigen::VectorXd::Zero(1);
  s2.C = Eigen::MatrixXd::Identity(1, 1);
  CHECK_THROWS_AS(AggregateModel(Dglm(no_weekly, s2), 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("constant totals: fitted level converges to log(total)") {
  auto agg = make_aggregate();
  for (int t = 0; t < 400; ++t) agg.update(100, 1.0);
  // log(100) = 4.60517...: the trend level carries it, the seasonal stays flat.
  double level = agg.dlm().state().m(0);
  CHECK(level == doctest::Approx(std::log(100.0)).epsilon(0.01));
  CHECK(std::abs(agg.next_day_factor_mean(1.0)) < 0.05);
  CHECK(agg.zero_total_days() == 0);
}

TEST_CASE("zero totals are guarded and counted") {
  auto agg = make_aggregate();
  agg.update(0, 1.0);  // log(0+1) = 0
  CHECK(agg.zero_total_days() == 1);
  CHECK_THROWS_AS(agg.update(5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(agg.update(-2, 1.0), std::invalid_argument);
}

TEST_CASE("known weekly pattern is recovered within 3 posterior sd") {
  std::vector<double> pattern = {0.22, -0.1, -0.18, 0.02, 0.1, 0.3, -0.36};
  double shift = 0.0;
  for (double v : pattern) shift += v / 7.0;
  for (double& v : pattern) v -= shift;

  auto agg = make_aggregate();
  RngStream rng(55, 1);
  auto observe = [&](int t) {
    double y = 3.0 + pattern[t % 7] + draw_normal(rng, 0.0, 0.01);
    // Feed through update() so the log-transform path is exercised.
    agg.update(static_cast<long>(std::lround(std::exp(y) * 1000.0)), 1.0);
    return y;
  };
  // update() takes raw totals; scale to keep integer rounding negligible.
  for (int t = 0; t < 365; ++t) observe(t);

  for (int t = 365; t < 372; ++t) {
    double predicted = agg.next_day_factor_mean(1.0);
    double sd = std::sqrt(std::max(weekly_factor_var(agg), 0.0));
    CHECK(std::abs(predicted - pattern[t % 7]) <= 3.0 * sd + 0.03);
    observe(t);
  }
}

TEST_CASE("log transform: an input of 100 is observed as 4.60517") {
  auto agg = make_aggregate();
  // One sharp-prior step: the 1-step forecast error against log(100) drives
  // the update; verify through the Student-t predictive location afterwards.
  for (int i = 0; i < 50; ++i) agg.update(100, 1.0);
  auto step = agg.dlm().prepare(agg.covariates_for(1.0));
  auto* st = std::get_if<StudentT>(&step.predictive);
  REQUIRE(st != nullptr);
  CHECK(st->loc == doctest::Approx(4.60517).epsilon(0.005));
}

TEST_CASE("factor paths: null seasonal state gives identically zero factors") {
  auto agg = make_aggregate(1.0, 0.0);  // zero seasonal variance, delta = 1
  for (int t = 0; t < 30; ++t) agg.update(50, 1.0);
  RngStream rng(77, 2);
  auto paths = agg.simulate_factor_paths(10, std::vector<double>(10, 1.0), 40, rng);
  for (int p = 0; p < paths.n_paths(); ++p) {
    for (int j = 0; j < paths.horizon(); ++j) {
      CHECK(std::abs(paths.phi(p, j)) <= 1e-9);
    }
  }
}

TEST_CASE("factor paths: 1-step values equal the posterior seasonal mean") {
  auto agg = make_aggregate();
  RngStream data_rng(88, 3);
  for (int t = 0; t < 120; ++t) {
    agg.update(40 + static_cast<long>(10.0 * std::sin(2.0 * kPi * t / 7.0)) +
                   static_cast<long>(3.0 * data_rng.uniform()),
               1.0);
  }
  double expected = agg.next_day_factor_mean(1.0);
  RngStream rng(88, 4);
  auto paths = agg.simulate_factor_paths(5, std::vector<double>(5, 1.0), 30, rng);
  for (int p = 0; p < paths.n_paths(); ++p) {
    CHECK(paths.phi(p, 0) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("factor paths: deterministic rotation repeats with period 7") {
  // Zero seasonal-block variance pins the weekly component: no update can
  // move it, so each path's factor is an exact 7-periodic rotation readout.
  auto agg = make_aggregate(1.0, 0.0);
  StateMoments s = agg.dlm().state();
  s.m(3) = 0.3;
  s.m(4) = -0.1;
  s.m(5) = 0.05;
  s.m(6) = 0.12;
  s.m(7) = -0.07;
  s.m(8) = 0.02;
  Dglm pinned(agg.dlm().spec(), s, agg.dlm().volatility());
  AggregateModel model(pinned, 0.0, 1.0);
  for (int t = 0; t < 50; ++t) model.update(60, 1.0);

  RngStream rng(99, 5);
  auto paths = model.simulate_factor_paths(16, std::vector<double>(16, 1.0), 10, rng);
  for (int p = 0; p < paths.n_paths(); ++p) {
    for (int j = 0; j + 7 < 16; ++j) {
      CHECK(paths.phi(p, j) == doctest::Approx(paths.phi(p, j + 7)).epsilon(1e-10));
    }
  }
}

TEST_CASE("zero loading with zero variance reproduces the unbound model bitwise") {
  DglmSpec with_factor;
  with_factor.family = Family::PoissonLoglinear;
  with_factor.layout.push_back({"level", ComponentKind::Intercept, "", 0, 0, 0});
  with_factor.layout.push_back({"x", ComponentKind::Covariate, "x", 0, 0, 1});
  with_factor.layout.push_back({"loading", ComponentKind::Covariate, "factor", 0, 0, 2});
  with_factor.discounts = {{0, 0.99}, {1, 0.99}, {2, 1.0}};

  DglmSpec without = with_factor;
  without.layout.pop_back();
  without.discounts.erase(2);

  StateMoments sf;
  sf.m = Eigen::VectorXd::Zero(3);
  sf.m(0) = 0.8;
  sf.m(1) = -0.3;
  sf.C = Eigen::MatrixXd::Identity(3, 3) * 0.5;
  sf.C(2, 2) = 0.0;  // zero-mean, zero-variance loading
  StateMoments su;
  su.m = sf.m.head(2);
  su.C = sf.C.topLeftCorner(2, 2);

  DglmSpec bin_f = with_factor;
  bin_f.family = Family::BinomialLogistic;
  DglmSpec bin_u = without;
  bin_u.family = Family::BinomialLogistic;

  DcmmModel bound(Dglm(bin_f, sf), Dglm(with_factor, sf));
  DcmmModel unbound(Dglm(bin_u, su), Dglm(without, su));

  FactorPaths factors;
  factors.phi = Eigen::MatrixXd::Random(64, 6);
  FactorBinding binding{&factors, "factor"};

  std::vector<Covariates> future(6);
  for (auto& cov : future) cov.set("x", 0.4);

  RngStream r1(123, 9), r2(123, 9);
  auto a = bound.forecast_transaction_paths(6, future, 64, r1, &binding);
  auto b = unbound.forecast_transaction_paths(6, future, 64, r2);
  for (std::size_t p = 0; p < a.size(); ++p) {
    CHECK(a[p].z == b[p].z);
    CHECK(a[p].b == b[p].b);
  }
}

TEST_CASE("factor paths are consumed read-only: item order cannot matter") {
  auto agg = make_aggregate();
  for (int t = 0; t < 60; ++t) agg.update(45 + (t % 7) * 2, 1.0);
  RngStream rng(101, 6);
  FactorPaths factors = agg.simulate_factor_paths(4, std::vector<double>(4, 1.0), 32, rng);
  Eigen::MatrixXd snapshot = factors.phi;
  FactorBinding binding{&factors, "factor"};

  DglmSpec spec;
  spec.family = Family::PoissonLoglinear;
  spec.layout.push_back({"level", ComponentKind::Intercept, "", 0, 0, 0});
  spec.layout.push_back({"loading", ComponentKind::Covariate, "factor", 0, 0, 1});
  spec.discounts = {{0, 0.99}, {1, 0.99}};
  DglmSpec bin = spec;
  bin.family = Family::BinomialLogistic;
  StateMoments s;
  s.m = Eigen::VectorXd::Zero(2);
  s.C = Eigen::MatrixXd::Identity(2, 2) * 0.4;

  auto run_item = [&](std::uint64_t key) {
    DcmmModel item(Dglm(bin, s), Dglm(spec, s));
    RngStream r(500, key);
    return item.forecast_transaction_paths(4, std::vector<Covariates>(4), 32, r, &binding);
  };

  auto a1 = run_item(1);
  auto b1 = run_item(2);
  auto b2 = run_item(2);  // reversed order: item 2 again, then item 1
  auto a2 = run_item(1);
  for (std::size_t p = 0; p < a1.size(); ++p) {
    CHECK(a1[p].b == a2[p].b);
    CHECK(b1[p].b == b2[p].b);
  }
  CHECK(factors.phi == snapshot);
}

TEST_CASE("factor path export writes one row per path") {
  FactorPaths paths;
  paths.phi.resize(3, 2);
  paths.phi << 0.25, -1.5, 0.0, 2.0, 1e-3, -0.125;
  std::string file = "factor_paths_test.csv";
  write_factor_paths(paths, file);
  std::ifstream in(file);
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line == "0.25,-1.5");
  ++rows;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
  std::remove(file.c_str());
}

TEST_CASE("horizon and shape validation") {
  auto agg = make_aggregate();
  for (int t = 0; t < 30; ++t) agg.update(40, 1.0);
  RngStream rng(7, 7);
  CHECK_THROWS_AS(agg.simulate_factor_paths(0, {}, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(agg.simulate_factor_paths(3, {1.0}, 10, rng), std::invalid_argument);

  FactorPaths small;
  small.phi.resize(4, 2);
  FactorBinding binding{&small, "factor"};
  DglmSpec spec;
  spec.family = Family::PoissonLoglinear;
  spec.layout.push_back({"level", ComponentKind::Intercept, "", 0, 0, 0});
  spec.layout.push_back({"loading", ComponentKind::Covariate, "factor", 0, 0, 1});
  spec.discounts = {{0, 1.0}, {1, 1.0}};
  DglmSpec bin = spec;
  bin.family = Family::BinomialLogistic;
  StateMoments s;
  s.m = Eigen::VectorXd::Zero(2);
  s.C = Eigen::MatrixXd::Identity(2, 2);
  DcmmModel model(Dglm(bin, s), Dglm(spec, s));
  RngStream r(1, 1);
  CHECK_THROWS_AS(model.forecast_transaction_paths(3, std::vector<Covariates>(3), 8, r, &binding),
                  std::invalid_argument);
}

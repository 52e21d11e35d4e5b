#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "countcast/conjugate.hpp"
#include "countcast/distributions.hpp"
#include "countcast/rng.hpp"
#include "countcast/special_functions.hpp"
#include "doctest.h"
#include "support/psi_oracle.hpp"

using namespace countcast;

TEST_CASE("digamma and trigamma match the precomputed oracle") {
  // Values frozen from an arbitrary-precision evaluation before the build.
  CHECK(std::abs(digamma(1.0) - -0.5772156649015329) <= 1e-10);
  CHECK(std::abs(digamma(2.0) - (1.0 - 0.5772156649015329)) <= 1e-10);
  CHECK(std::abs(trigamma(1.0) - 1.6449340668482264) <= 1e-10);
  CHECK(std::abs(trigamma(0.5) - 4.934802200544679) <= 1e-10);

  for (int i = 0; i < psi_oracle::count; ++i) {
    const auto& pt = psi_oracle::points[i];
    CAPTURE(pt.x);
    CHECK(std::abs(digamma(pt.x) - pt.digamma) <=
          std::max(1e-10, 1e-13 * std::abs(pt.digamma)));
    CHECK(std::abs(trigamma(pt.x) - pt.trigamma) <=
          std::max(1e-10, 1e-13 * std::abs(pt.trigamma)));
  }
}

TEST_CASE("psi recurrences hold") {
  for (double x : {0.5, 2.0, 37.25}) {
    CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) <= 1e-10);
  }
  for (double x : {0.5, 3.0, 11.0}) {
    CHECK(std::abs(trigamma(x) - trigamma(x + 1.0) - 1.0 / (x * x)) <= 1e-10);
  }
  RngStream rng(11, 0);
  for (int i = 0; i < 200; ++i) {
    double x = std::exp(rng.uniform() * 10.0 - 4.0);
    CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) <=
          1e-10 * std::max(1.0, 1.0 / x));
    CHECK(std::abs(trigamma(x) - trigamma(x + 1.0) - 1.0 / (x * x)) <=
          1e-10 * std::max(1.0, 1.0 / (x * x)));
    CHECK(trigamma(x) > 0.0);
  }
}

TEST_CASE("psi domain errors") {
  CHECK_THROWS_AS(digamma(0.0), std::domain_error);
  CHECK_THROWS_AS(digamma(-2.0), std::domain_error);
  CHECK_THROWS_AS(trigamma(-1e-9), std::domain_error);
  CHECK_THROWS_AS(digamma(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST_CASE("gamma moment solve: frozen cases") {
  // psi(1) = -gamma, psi'(1) = pi^2/6 -> alpha = beta = 1.
  auto p = solve_gamma_from_moments({-0.5772156649015329, 1.6449340668482264});
  CHECK(p.alpha == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(p.beta == doctest::Approx(1.0).epsilon(1e-8));

  // Forward map at (10, 2): f = psi(10) - log 2, q = psi'(10).
  auto p2 = solve_gamma_from_moments({1.5586054085067758, 0.10516633568168575});
  CHECK(p2.alpha == doctest::Approx(10.0).epsilon(1e-7));
  CHECK(p2.beta == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("beta moment solve: frozen cases") {
  // Symmetric case: f = 0, q = 2 psi'(1).
  auto p = solve_beta_from_moments({0.0, 3.289868133696453});
  CHECK(p.alpha == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(p.beta == doctest::Approx(1.0).epsilon(1e-8));

  // Round-trip through the forward map at (5, 0.5).
  auto fwd = beta_forward_moments({5.0, 0.5});
  auto back = solve_beta_from_moments(fwd);
  CHECK(back.alpha == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(back.beta == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("solver round-trips over the practical grid") {
  for (double f = -5.0; f <= 5.0 + 1e-9; f += 0.5) {
    for (double q : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
      CAPTURE(f);
      CAPTURE(q);
      auto g = solve_gamma_from_moments({f, q});
      auto gm = gamma_forward_moments(g);
      CHECK(std::abs(gm.f - f) <= 1e-8);
      CHECK(std::abs(gm.q - q) <= 1e-8 * std::max(1.0, q));

      auto b = solve_beta_from_moments({f, q});
      auto bm = beta_forward_moments(b);
      CHECK(std::abs(bm.f - f) <= 1e-8 * std::max(1.0, std::abs(f)));
      CHECK(std::abs(bm.q - q) <= 1e-8 * std::max(1.0, q));
    }
  }
}

TEST_CASE("beta solve symmetry: negating f swaps the parameters") {
  for (double f : {0.3, 1.7, 4.2}) {
    for (double q : {0.05, 0.8, 6.0}) {
      auto a = solve_beta_from_moments({f, q});
      auto b = solve_beta_from_moments({-f, q});
      CHECK(a.alpha == doctest::Approx(b.beta).epsilon(1e-9));
      CHECK(a.beta == doctest::Approx(b.alpha).epsilon(1e-9));
    }
  }
}

TEST_CASE("solver domain errors") {
  CHECK_THROWS_AS(solve_gamma_from_moments({0.0, -1.0}), std::domain_error);
  CHECK_THROWS_AS(solve_beta_from_moments({0.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(
      solve_gamma_from_moments({std::numeric_limits<double>::infinity(), 1.0}),
      std::domain_error);
}

TEST_CASE("rng streams are reproducible and stream-separated") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next() == b.next());
  }
  int differs = 0;
  for (int i = 0; i < 100; ++i) differs += (b.next() != c.next());
  CHECK(differs > 90);

  RngStream base(1, 2);
  RngStream s1 = base.substream(5);
  RngStream s2 = base.substream(5);
  CHECK(s1 == s2);
  for (int i = 0; i < 100; ++i) CHECK(s1.next() == s2.next());
}

TEST_CASE("sampling trivia") {
  RngStream rng(3, 1);
  CHECK(sample(Binomial{0, 0.3}, rng) == 0.0);
  CHECK(sample(Poisson{0.0}, rng) == 0.0);
  Distribution deg = DiscreteWeighted{{7.0}, {2.0}};
  CHECK(sample(deg, rng) == 7.0);
  CHECK_THROWS_AS(sample(Bernoulli{1.5}, rng), std::domain_error);
  CHECK_THROWS_AS(sample(GammaDist{-1.0, 1.0}, rng), std::domain_error);
  CHECK_THROWS_AS(sample(NegativeBinomial{2.0, 0.0}, rng), std::domain_error);
  CHECK_THROWS_AS(draw_discrete_weighted(rng, {}, {}), std::domain_error);
}

namespace {

struct Moments {
  double mean, var;
};

Moments empirical(const Distribution& dist, long n, RngStream& rng) {
  double sum = 0.0, sumsq = 0.0;
  for (long i = 0; i < n; ++i) {
    double v = sample(dist, rng);
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / static_cast<double>(n);
  return {mean, sumsq / static_cast<double>(n) - mean * mean};
}

void check_moments(const Distribution& dist, double mean, double var, double kurt_excess,
                   RngStream& rng) {
  const long n = 1000000;
  Moments m = empirical(dist, n, rng);
  double se_mean = std::sqrt(var / static_cast<double>(n));
  // Var[s^2] ~ var^2 (2 + excess kurtosis) / n.
  double se_var = var * std::sqrt((2.0 + std::max(kurt_excess, 0.0)) / static_cast<double>(n));
  CHECK(std::abs(m.mean - mean) <= 4.0 * se_mean + 1e-12);
  CHECK(std::abs(m.var - var) <= 4.0 * se_var + 1e-9);
}

}  // namespace

TEST_CASE("sampler empirical moments match analytic moments") {
  RngStream rng(2024, 99);
  check_moments(Bernoulli{0.3}, 0.3, 0.21, 1.0 / 0.21 - 6.0, rng);
  check_moments(Binomial{10, 0.3}, 3.0, 2.1, (1 - 6 * 0.21) / 2.1, rng);
  check_moments(Beta{2.0, 3.0}, 0.4, 0.04, 0.0, rng);
  check_moments(GammaDist{2.5, 1.5}, 2.5 / 1.5, 2.5 / 2.25, 6.0 / 2.5, rng);
  check_moments(Poisson{4.2}, 4.2, 4.2, 1.0 / 4.2, rng);
  // Nb(alpha, beta/(1+beta)) with alpha = 3, beta = 1.5: mean alpha/beta = 2.
  check_moments(NegativeBinomial{3.0, 0.6}, 2.0, 2.0 / 0.6, 2.0, rng);
  check_moments(BetaBernoulli{2.0, 6.0}, 0.25, 0.1875, 0.0, rng);
  check_moments(BetaBinomial{5, 2.0, 2.0}, 2.5, 5.0 * 4.0 * 9.0 / (16.0 * 5.0), 0.0, rng);
  check_moments(Normal{1.5, 4.0}, 1.5, 4.0, 0.0, rng);
  check_moments(StudentT{6.0, 2.0, 1.5}, 2.0, 1.5 * 1.5 * 6.0 / 4.0, 3.0, rng);
  check_moments(DiscreteWeighted{{1.0, 5.0, 9.0}, {1.0, 2.0, 1.0}}, 5.0, 8.0, 0.0, rng);
}

TEST_CASE("poisson mean at 1e6 draws, both algorithm branches") {
  RngStream rng(5, 5);
  const long n = 1000000;
  for (double mu : {4.2, 64.0}) {
    double sum = 0.0;
    for (long i = 0; i < n; ++i) sum += static_cast<double>(draw_poisson(rng, mu));
    double se = std::sqrt(mu / static_cast<double>(n));
    CHECK(std::abs(sum / n - mu) <= 3.0 * se);
  }
}

TEST_CASE("fixed stream implies identical draw sequences per distribution") {
  std::vector<Distribution> dists = {
      Bernoulli{0.4},     Binomial{7, 0.6},          Beta{1.5, 2.5},
      GammaDist{0.4, 2.0}, Poisson{12.0},            NegativeBinomial{2.0, 0.3},
      BetaBernoulli{3, 4}, BetaBinomial{6, 1.0, 2.0}, Normal{0, 1},
      StudentT{5, 0, 1},   DiscreteWeighted{{1, 2, 3}, {1, 1, 2}}};
  for (const auto& dist : dists) {
    RngStream r1(77, 3), r2(77, 3);
    for (int i = 0; i < 200; ++i) {
      CHECK(sample(dist, r1) == sample(dist, r2));
    }
  }
}

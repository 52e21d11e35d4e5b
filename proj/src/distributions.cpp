#include "countcast/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace countcast {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

double std_normal(RngStream& rng) {
  double u1 = rng.uniform();
  double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Marsaglia-Tsang squeeze, shape >= 1.
double gamma_shape_ge1(RngStream& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = std_normal(rng);
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = rng.uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Hoermann's PTRS transformed rejection, mean >= 10.
long poisson_ptrs(RngStream& rng, double mean) {
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    double us = 0.5 - std::abs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    if (lhs <= kf * log_mean - mean - std::lgamma(kf + 1.0)) {
      return static_cast<long>(kf);
    }
  }
}

}  // namespace

bool draw_bernoulli(RngStream& rng, double p) {
  require(p >= 0.0 && p <= 1.0 && std::isfinite(p), "Bernoulli: p outside [0,1]");
  return rng.uniform() < p;
}

long draw_binomial(RngStream& rng, long trials, double p) {
  require(trials >= 0, "Binomial: negative trial count");
  require(p >= 0.0 && p <= 1.0 && std::isfinite(p), "Binomial: p outside [0,1]");
  long successes = 0;
  for (long i = 0; i < trials; ++i) successes += rng.uniform() < p;
  return successes;
}

double draw_gamma(RngStream& rng, double shape, double rate) {
  require(shape > 0.0 && rate > 0.0, "Gamma: shape and rate must be positive");
  if (shape >= 1.0) return gamma_shape_ge1(rng, shape) / rate;
  // Boost the shape by one: G(a) = G(a+1) * U^{1/a}
  double g = gamma_shape_ge1(rng, shape + 1.0);
  double u = rng.uniform();
  return g * std::exp(std::log(u) / shape) / rate;
}

double draw_beta(RngStream& rng, double alpha, double beta) {
  require(alpha > 0.0 && beta > 0.0, "Beta: parameters must be positive");
  double x = draw_gamma(rng, alpha, 1.0);
  double y = draw_gamma(rng, beta, 1.0);
  double s = x + y;
  if (s <= 0.0) return alpha / (alpha + beta);  // both underflowed
  return x / s;
}

long draw_poisson(RngStream& rng, double mean) {
  require(mean >= 0.0 && std::isfinite(mean), "Poisson: mean must be finite, >= 0");
  if (mean == 0.0) return 0;
  if (mean >= 10.0) return poisson_ptrs(rng, mean);
  // Knuth product-of-uniforms
  double limit = std::exp(-mean);
  double prod = rng.uniform();
  long k = 0;
  while (prod > limit) {
    prod *= rng.uniform();
    ++k;
  }
  return k;
}

long draw_negative_binomial(RngStream& rng, double alpha, double p) {
  require(alpha > 0.0, "NegativeBinomial: alpha must be positive");
  require(p > 0.0 && p <= 1.0, "NegativeBinomial: p outside (0,1]");
  if (p == 1.0) return 0;
  // Gamma-Poisson mixture with rate p/(1-p)
  double lambda = draw_gamma(rng, alpha, p / (1.0 - p));
  return draw_poisson(rng, lambda);
}

double draw_normal(RngStream& rng, double mean, double var) {
  require(var >= 0.0 && std::isfinite(var), "Normal: variance must be >= 0");
  return mean + std::sqrt(var) * std_normal(rng);
}

double draw_student_t(RngStream& rng, double dof, double loc, double scale) {
  require(dof > 0.0 && scale >= 0.0, "StudentT: dof > 0 and scale >= 0 required");
  double z = std_normal(rng);
  double g = draw_gamma(rng, 0.5 * dof, 0.5);  // chi-square(dof)
  return loc + scale * z / std::sqrt(g / dof);
}

long draw_beta_binomial(RngStream& rng, long trials, double alpha, double beta) {
  require(alpha > 0.0 && beta > 0.0, "BetaBinomial: parameters must be positive");
  if (trials == 0) return 0;
  double pi = draw_beta(rng, alpha, beta);
  return draw_binomial(rng, trials, std::clamp(pi, 0.0, 1.0));
}

double draw_discrete_weighted(RngStream& rng, const std::vector<double>& values,
                              const std::vector<double>& weights) {
  require(!values.empty() && values.size() == weights.size(),
          "DiscreteWeighted: values/weights size mismatch or empty");
  double total = 0.0;
  for (double w : weights) {
    require(w >= 0.0 && std::isfinite(w), "DiscreteWeighted: bad weight");
    total += w;
  }
  require(total > 0.0, "DiscreteWeighted: weights sum to zero");
  double u = rng.uniform() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    cum += weights[i];
    if (u < cum) return values[i];
  }
  return values.back();
}

double sample(const Distribution& dist, RngStream& rng) {
  return std::visit(
      [&rng](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Bernoulli>) {
          return draw_bernoulli(rng, d.p) ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, Binomial>) {
          return static_cast<double>(draw_binomial(rng, d.trials, d.p));
        } else if constexpr (std::is_same_v<T, Beta>) {
          return draw_beta(rng, d.alpha, d.beta);
        } else if constexpr (std::is_same_v<T, GammaDist>) {
          return draw_gamma(rng, d.shape, d.rate);
        } else if constexpr (std::is_same_v<T, Poisson>) {
          return static_cast<double>(draw_poisson(rng, d.mean));
        } else if constexpr (std::is_same_v<T, NegativeBinomial>) {
          return static_cast<double>(draw_negative_binomial(rng, d.alpha, d.p));
        } else if constexpr (std::is_same_v<T, BetaBernoulli>) {
          require(d.alpha > 0.0 && d.beta > 0.0, "BetaBernoulli: parameters must be positive");
          return draw_bernoulli(rng, d.alpha / (d.alpha + d.beta)) ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, BetaBinomial>) {
          return static_cast<double>(draw_beta_binomial(rng, d.trials, d.alpha, d.beta));
        } else if constexpr (std::is_same_v<T, Normal>) {
          return draw_normal(rng, d.mean, d.var);
        } else if constexpr (std::is_same_v<T, StudentT>) {
          return draw_student_t(rng, d.dof, d.loc, d.scale);
        } else {
          return draw_discrete_weighted(rng, d.values, d.weights);
        }
      },
      dist);
}

double log_pmf_negative_binomial(long y, double alpha, double p) {
  require(alpha > 0.0 && p > 0.0 && p <= 1.0, "NegativeBinomial: bad parameters");
  if (y < 0) return -std::numeric_limits<double>::infinity();
  double yd = static_cast<double>(y);
  return std::lgamma(yd + alpha) - std::lgamma(alpha) - std::lgamma(yd + 1.0) +
         alpha * std::log(p) + yd * std::log1p(-p);
}

double cdf_negative_binomial(long y, double alpha, double p) {
  if (y < 0) return 0.0;
  // Recursive pmf ratio: pmf(k+1)/pmf(k) = (k+alpha)(1-p)/(k+1)
  double pmf = std::exp(alpha * std::log(p));
  double cum = pmf;
  for (long k = 0; k < y; ++k) {
    pmf *= (static_cast<double>(k) + alpha) * (1.0 - p) / (static_cast<double>(k) + 1.0);
    cum += pmf;
  }
  return std::min(cum, 1.0);
}

double log_pmf_beta_binomial(long y, long trials, double alpha, double beta) {
  require(alpha > 0.0 && beta > 0.0, "BetaBinomial: bad parameters");
  if (y < 0 || y > trials) return -std::numeric_limits<double>::infinity();
  double yd = static_cast<double>(y);
  double h = static_cast<double>(trials);
  auto lbeta = [](double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  };
  return std::lgamma(h + 1.0) - std::lgamma(yd + 1.0) - std::lgamma(h - yd + 1.0) +
         lbeta(yd + alpha, h - yd + beta) - lbeta(alpha, beta);
}

double cdf_beta_binomial(long y, long trials, double alpha, double beta) {
  if (y < 0) return 0.0;
  if (y >= trials) return 1.0;
  double cum = 0.0;
  for (long k = 0; k <= y; ++k) cum += std::exp(log_pmf_beta_binomial(k, trials, alpha, beta));
  return std::min(cum, 1.0);
}

}  // namespace countcast

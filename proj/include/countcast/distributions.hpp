#pragma once

#include <variant>
#include <vector>

#include "countcast/rng.hpp"

namespace countcast {

// Distribution descriptors. Values, not generators: a descriptor plus an
// RngStream fully determines a draw.

struct Bernoulli {
  double p;
};
struct Binomial {
  long trials;
  double p;
};
struct Beta {
  double alpha, beta;
};
struct GammaDist {
  double shape, rate;
};
struct Poisson {
  double mean;
};
// Success probability p; pmf C(y+alpha-1, y) p^alpha (1-p)^y, mean alpha(1-p)/p.
struct NegativeBinomial {
  double alpha, p;
};
struct BetaBernoulli {
  double alpha, beta;
};
struct BetaBinomial {
  long trials;
  double alpha, beta;
};
struct Normal {
  double mean, var;
};
struct StudentT {
  double dof, loc, scale;
};
struct DiscreteWeighted {
  std::vector<double> values;
  std::vector<double> weights;
};

using Distribution =
    std::variant<Bernoulli, Binomial, Beta, GammaDist, Poisson, NegativeBinomial,
                 BetaBernoulli, BetaBinomial, Normal, StudentT, DiscreteWeighted>;

double sample(const Distribution& dist, RngStream& rng);

// Typed draws used on hot paths.
bool draw_bernoulli(RngStream& rng, double p);
long draw_binomial(RngStream& rng, long trials, double p);
double draw_beta(RngStream& rng, double alpha, double beta);
double draw_gamma(RngStream& rng, double shape, double rate);
long draw_poisson(RngStream& rng, double mean);
long draw_negative_binomial(RngStream& rng, double alpha, double p);
double draw_normal(RngStream& rng, double mean, double var);
double draw_student_t(RngStream& rng, double dof, double loc, double scale);
long draw_beta_binomial(RngStream& rng, long trials, double alpha, double beta);
double draw_discrete_weighted(RngStream& rng, const std::vector<double>& values,
                              const std::vector<double>& weights);

// Log-mass and cdf of the conjugate 1-step predictive families.
double log_pmf_negative_binomial(long y, double alpha, double p);
double cdf_negative_binomial(long y, double alpha, double p);  // P(Y <= y), y<0 -> 0
double log_pmf_beta_binomial(long y, long trials, double alpha, double beta);
double cdf_beta_binomial(long y, long trials, double alpha, double beta);

}  // namespace countcast

#pragma once

#include <stdexcept>

namespace countcast {

// Mean/variance of the linear predictor implied by the state prior.
struct PredictorMoments {
  double f = 0.0;  // prior mean
  double q = 1.0;  // prior variance, > 0
};

// Parameters of the moment-matched Beta or Gamma distribution.
struct ConjugateParams {
  double alpha = 1.0;
  double beta = 1.0;
};

struct SolverFailure : std::runtime_error {
  SolverFailure(const char* what, ConjugateParams last)
      : std::runtime_error(what), last_iterate(last) {}
  ConjugateParams last_iterate;
};

// Process-wide Newton controls; set once (e.g. from config) before any
// parallel filtering starts.
struct SolverOptions {
  int max_iter = 100;
  double tol = 1e-8;  // accepted residual bound on both moment equations
};

SolverOptions& solver_options();

// Gamma(alpha, rate beta) with psi(alpha) - log(beta) = f, psi'(alpha) = q.
ConjugateParams solve_gamma_from_moments(PredictorMoments moments);

// Beta(alpha, beta) with psi(alpha) - psi(beta) = f, psi'(alpha) + psi'(beta) = q.
ConjugateParams solve_beta_from_moments(PredictorMoments moments);

// Forward moment maps, used by round-trip checks and the update step.
PredictorMoments gamma_forward_moments(ConjugateParams p);
PredictorMoments beta_forward_moments(ConjugateParams p);

}  // namespace countcast

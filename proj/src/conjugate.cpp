#include "countcast/conjugate.hpp"

#include <algorithm>
#include <cmath>

#include "countcast/special_functions.hpp"

namespace countcast {

SolverOptions& solver_options() {
  static SolverOptions opts;
  return opts;
}

namespace {

void check_q(const PredictorMoments& m) {
  if (!(m.q > 0.0) || !std::isfinite(m.q) || !std::isfinite(m.f)) {
    throw std::domain_error("conjugate solve: require finite f and q > 0");
  }
}

// Iterate to well inside the accepted bound; Newton normally lands far below.
double target_tol() { return solver_options().tol * 1e-3; }

}  // namespace

ConjugateParams solve_gamma_from_moments(PredictorMoments moments) {
  check_q(moments);
  const double f = moments.f;
  const double q = moments.q;
  const int max_iter = solver_options().max_iter;
  const double tol = target_tol() * std::max(1.0, q);

  // 1-D root: psi'(alpha) = q, psi' strictly decreasing. Newton with a
  // bisection bracket as safety net.
  double alpha = std::max(1.0 / q, 1e-3);
  double lo, hi;  // psi'(lo) > q > psi'(hi)
  if (trigamma(alpha) > q) {
    lo = alpha;
    hi = alpha;
    do hi *= 2.0; while (trigamma(hi) > q);
  } else {
    hi = alpha;
    lo = alpha;
    do lo *= 0.5; while (trigamma(lo) <= q);
  }

  double resid = trigamma(alpha) - q;
  for (int it = 0; it < max_iter && std::abs(resid) > tol; ++it) {
    (resid > 0.0 ? lo : hi) = alpha;
    double next = alpha - resid / tetragamma(alpha);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == alpha) break;
    alpha = next;
    resid = trigamma(alpha) - q;
  }

  double beta = std::exp(digamma(alpha) - f);
  ConjugateParams out{alpha, beta};
  if (std::abs(resid) > solver_options().tol * std::max(1.0, q) ||
      !std::isfinite(beta) || beta <= 0.0) {
    throw SolverFailure("gamma moment solve did not converge", out);
  }
  return out;
}

ConjugateParams solve_beta_from_moments(PredictorMoments moments) {
  check_q(moments);
  const double f = moments.f;
  const double q = moments.q;
  const int max_iter = solver_options().max_iter;
  const double tol_f = target_tol() * std::max(1.0, std::abs(f));
  const double tol_q = target_tol() * std::max(1.0, q);

  // Start from the large-parameter limit psi(a) ~ log a, psi'(a) ~ 1/a:
  // f ~ log(a/b), q ~ 1/a + 1/b  =>  a0 = (1+e^f)/q, b0 = (1+e^-f)/q.
  // At f = 0 this is the 2/q moment heuristic; the exp factors supply the
  // sign adjustment.
  double a = std::max((1.0 + std::exp(std::min(f, 700.0))) / q, 1e-8);
  double b = std::max((1.0 + std::exp(std::min(-f, 700.0))) / q, 1e-8);

  double ra = digamma(a) - digamma(b) - f;
  double rb = trigamma(a) + trigamma(b) - q;
  for (int it = 0; it < max_iter && (std::abs(ra) > tol_f || std::abs(rb) > tol_q); ++it) {
    double j11 = trigamma(a), j12 = -trigamma(b);
    double j21 = tetragamma(a), j22 = tetragamma(b);
    double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) break;
    double da = (ra * j22 - rb * j12) / det;
    double db = (rb * j11 - ra * j21) / det;
    // Halve any step that would cross zero.
    double damp = 1.0;
    while (a - damp * da <= 0.0 || b - damp * db <= 0.0) damp *= 0.5;
    a -= damp * da;
    b -= damp * db;
    ra = digamma(a) - digamma(b) - f;
    rb = trigamma(a) + trigamma(b) - q;
  }

  if (std::abs(ra) > solver_options().tol * std::max(1.0, std::abs(f)) ||
      std::abs(rb) > solver_options().tol * std::max(1.0, q)) {
    throw SolverFailure("beta moment solve did not converge", {a, b});
  }
  return {a, b};
}

PredictorMoments gamma_forward_moments(ConjugateParams p) {
  return {digamma(p.alpha) - std::log(p.beta), trigamma(p.alpha)};
}

PredictorMoments beta_forward_moments(ConjugateParams p) {
  return {digamma(p.alpha) - digamma(p.beta), trigamma(p.alpha) + trigamma(p.beta)};
}

}  // namespace countcast

#include "countcast/dcmm.hpp"

#include <cmath>
#include <stdexcept>

namespace countcast {

namespace {

double success_prob(const Distribution& predictive) {
  const auto* bb = std::get_if<BetaBinomial>(&predictive);
  if (bb == nullptr) throw std::logic_error("binary component predictive is not Beta-Binomial");
  return bb->alpha / (bb->alpha + bb->beta);
}

const NegativeBinomial& negbin(const Distribution& predictive) {
  const auto* nb = std::get_if<NegativeBinomial>(&predictive);
  if (nb == nullptr) throw std::logic_error("count component predictive is not negative binomial");
  return *nb;
}

void apply_factor(Covariates& day, const FactorBinding* factor, int path, int step) {
  if (factor != nullptr && factor->paths != nullptr) {
    day.set(factor->column, factor->paths->phi(path, step));
  }
}

}  // namespace

DcmmModel::DcmmModel(Dglm binary, Dglm count)
    : binary_(std::move(binary)), count_(std::move(count)) {
  if (binary_.spec().family != Family::BinomialLogistic) {
    throw std::invalid_argument("DCMM binary component must be binomial-logistic");
  }
  if (count_.spec().family != Family::PoissonLoglinear) {
    throw std::invalid_argument("DCMM count component must be Poisson-loglinear");
  }
}

FilterDiagnostics DcmmModel::filter_step(long b, const Covariates& day, RngStream& rng) {
  if (b < 0) throw std::invalid_argument("filter_step: negative count");
  Dglm::Step bstep = binary_.prepare(day, 1);
  Dglm::Step cstep = count_.prepare(day);

  // Mixture predictive of b: P(0) = 1-pi, P(m) = pi * Nb(m-1) for m >= 1.
  double pi = success_prob(bstep.predictive);
  const NegativeBinomial& nb = negbin(cstep.predictive);
  auto cdf = [&](long v) {
    if (v < 0) return 0.0;
    return (1.0 - pi) + pi * cdf_negative_binomial(v - 1, nb.alpha, nb.p);
  };
  FilterDiagnostics diag;
  double mass = (b == 0) ? (1.0 - pi)
                         : pi * std::exp(log_pmf_negative_binomial(b - 1, nb.alpha, nb.p));
  diag.log_score = std::log(std::max(mass, 1e-300));
  double lo = cdf(b - 1);
  double hi = cdf(b);
  diag.pit = lo + rng.uniform() * (hi - lo);

  int z = b > 0 ? 1 : 0;
  binary_.observe(bstep, z, 1);
  if (z == 1) {
    count_.observe(cstep, static_cast<double>(b - 1));
  } else {
    count_.observe_missing(cstep);
  }
  return diag;
}

std::vector<TransactionPath> DcmmModel::forecast_transaction_paths(
    int horizon, const std::vector<Covariates>& future, int n_paths, RngStream& rng,
    const FactorBinding* factor) const {
  if (n_paths <= 0) throw std::invalid_argument("forecast: path count must be positive");
  if (static_cast<int>(future.size()) < horizon) {
    throw std::invalid_argument("forecast: future covariates shorter than horizon");
  }
  if (factor != nullptr && factor->paths != nullptr &&
      (factor->paths->n_paths() != n_paths || factor->paths->horizon() < horizon)) {
    throw std::invalid_argument("forecast: factor path shape mismatch");
  }

  std::vector<TransactionPath> out(n_paths);
  for (int p = 0; p < n_paths; ++p) {
    RngStream stream = rng.substream(static_cast<std::uint64_t>(p));
    TransactionPath& path = out[p];
    path.z.resize(horizon);
    path.b.assign(horizon, 0);

    // Indicator path from the binary component.
    Dglm binary = binary_;
    for (int j = 0; j < horizon; ++j) {
      Covariates day = future[j];
      apply_factor(day, factor, p, j);
      Dglm::Step step = binary.prepare(day, 1);
      int z = draw_bernoulli(stream, success_prob(step.predictive)) ? 1 : 0;
      binary.observe(step, z, 1);
      path.z[j] = z;
    }

    // Levels on z = 1 days from the shifted-Poisson component.
    Dglm count = count_;
    for (int j = 0; j < horizon; ++j) {
      if (path.z[j] != 1) {
        count.step_missing();
        continue;
      }
      Covariates day = future[j];
      apply_factor(day, factor, p, j);
      Dglm::Step step = count.prepare(day);
      const NegativeBinomial& nb = negbin(step.predictive);
      long x = draw_negative_binomial(stream, nb.alpha, nb.p);
      count.observe(step, static_cast<double>(x));
      path.b[j] = 1 + x;
    }
  }
  return out;
}

double DcmmModel::one_step_mean(const Covariates& day) const {
  Dglm::Step bstep = binary_.prepare(day, 1);
  Dglm::Step cstep = count_.prepare(day);
  double pi = success_prob(bstep.predictive);
  const NegativeBinomial& nb = negbin(cstep.predictive);
  double mean_x = nb.alpha * (1.0 - nb.p) / nb.p;
  return pi * (1.0 + mean_x);
}

bool DcmmModel::operator==(const DcmmModel& other) const {
  return binary_ == other.binary_ && count_ == other.count_;
}

}  // namespace countcast

#include "countcast/multiscale.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace countcast {

AggregateModel::AggregateModel(Dglm dlm, double price_mean, double price_sd)
    : dlm_(std::move(dlm)), price_mean_(price_mean), price_sd_(price_sd > 0 ? price_sd : 1.0) {
  if (dlm_.spec().family != Family::Normal) {
    throw std::invalid_argument("aggregate model must be a normal DLM");
  }
  int at = 0;
  for (const auto& c : dlm_.spec().layout) {
    if (c.kind == ComponentKind::Fourier && c.period == 7) weekly_coords_.push_back(at);
    at += (c.kind == ComponentKind::Intercept || c.kind == ComponentKind::Covariate) ? 1 : 2;
  }
  if (weekly_coords_.empty()) {
    throw std::invalid_argument("aggregate model needs a period-7 Fourier component");
  }
}

Covariates AggregateModel::covariates_for(double avg_price) const {
  if (!(avg_price > 0.0)) throw std::invalid_argument("aggregate: price must be positive");
  Covariates cov;
  cov.set("agg_price", (std::log(avg_price) - price_mean_) / price_sd_);
  return cov;
}

void AggregateModel::update(long total_transactions, double avg_price) {
  if (total_transactions < 0) throw std::invalid_argument("aggregate: negative total");
  double total = static_cast<double>(total_transactions);
  if (total_transactions == 0) {
    total = 1.0;  // log(total + 1); tracked, see zero_total_days()
    zero_total_days_ += 1;
  }
  dlm_.dlm_step(covariates_for(avg_price), std::log(total));
}

double AggregateModel::weekly_contribution(const StateMoments& s) const {
  double phi = 0.0;
  for (int idx : weekly_coords_) phi += s.m(idx);  // F = (1, 0) per harmonic
  return phi;
}

double AggregateModel::next_day_factor_mean(double avg_price) const {
  Dglm::Step step = dlm_.prepare(covariates_for(avg_price));
  return weekly_contribution(step.prior);
}

FactorPaths AggregateModel::simulate_factor_paths(int horizon,
                                                  const std::vector<double>& future_avg_price,
                                                  int n_paths, RngStream& rng) const {
  if (horizon <= 0) throw std::invalid_argument("factor paths: horizon must be positive");
  if (n_paths <= 0) throw std::invalid_argument("factor paths: path count must be positive");
  if (static_cast<int>(future_avg_price.size()) < horizon) {
    throw std::invalid_argument("factor paths: future prices shorter than horizon");
  }
  FactorPaths out;
  out.phi.resize(n_paths, horizon);
  for (int p = 0; p < n_paths; ++p) {
    RngStream stream = rng.substream(0xfac70 + static_cast<std::uint64_t>(p));
    Dglm dlm = dlm_;
    for (int j = 0; j < horizon; ++j) {
      Dglm::Step step = dlm.prepare(covariates_for(future_avg_price[j]));
      out.phi(p, j) = weekly_contribution(step.prior);
      double y = sample(step.predictive, stream);
      dlm.observe(step, y);
    }
  }
  return out;
}

void write_factor_paths(const FactorPaths& paths, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  char buf[32];
  for (int p = 0; p < paths.n_paths(); ++p) {
    for (int j = 0; j < paths.horizon(); ++j) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), paths.phi(p, j));
      if (j > 0) out << ',';
      out.write(buf, end - buf);
    }
    out << '\n';
  }
}

}  // namespace countcast

#pragma once

#include <optional>
#include <vector>

#include "countcast/dglm.hpp"
#include "countcast/multiscale.hpp"

namespace countcast {

// One simulated transactions future. b[j] = 0 iff z[j] = 0; z[j] = 1 implies
// b[j] >= 1 (shifted-Poisson support).
struct TransactionPath {
  std::vector<int> z;
  std::vector<long> b;
};

struct FilterDiagnostics {
  double log_score = 0.0;  // 1-step log predictive density of the observed count
  double pit = 0.0;        // randomized PIT draw, computed before updating
};

// Zero/non-zero Bernoulli DGLM coupled with a shifted-Poisson DGLM for the
// positive part. Also serves as the benchmark model when fed sales directly.
class DcmmModel {
 public:
  DcmmModel(Dglm binary, Dglm count);

  const Dglm& binary() const { return binary_; }
  const Dglm& count() const { return count_; }

  // One filtering day: observe the count b_t >= 0. Diagnostics are evaluated
  // against the 1-step predictive before the update.
  FilterDiagnostics filter_step(long b, const Covariates& day, RngStream& rng);

  // M joint k-step paths by compositional sampling on state copies. The
  // filtered state is untouched. Optional factor binding substitutes the
  // bound column of each day's covariates with that path's factor value.
  std::vector<TransactionPath> forecast_transaction_paths(
      int horizon, const std::vector<Covariates>& future, int n_paths,
      RngStream& rng, const FactorBinding* factor = nullptr) const;

  // Analytic 1-step mean E[b] = P(z=1) * (1 + E[x]) from the two conjugate
  // predictives; the oracle side of the compositional simulation.
  double one_step_mean(const Covariates& day) const;

  bool operator==(const DcmmModel& other) const;

 private:
  Dglm binary_;
  Dglm count_;
};

}  // namespace countcast

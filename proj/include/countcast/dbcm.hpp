#pragma once

#include <map>
#include <vector>

#include "countcast/dcmm.hpp"
#include "countcast/dglm.hpp"

namespace countcast {

// One day's transactions split into exceedance counts. n[r-1] counts baskets
// with more than r units; excess_sizes lists the full sizes of baskets
// exceeding the depth (each >= d+1, summing to e).
struct DayDecomposition {
  long b = 0;              // transactions
  std::vector<long> n;     // exceedance counts, length d
  long e = 0;              // total units in baskets larger than d
  long y = 0;              // total units
  int d = 0;               // cascade depth
  std::vector<long> excess_sizes;

  void validate() const;  // throws std::invalid_argument on violated invariants
};

DayDecomposition decompose_day(const std::vector<long>& basket_sizes, int depth);

// The sales identity: y = sum_r r * (n[r-1] - n[r]) + e with n[0] = b.
long sales_from_counts(long b, const std::vector<long>& n, long e);

enum class ExcessMode { Unspecified, Empirical };

// Multiset of observed whole-basket sizes above the cascade depth. All
// history is retained; excesses are rare and support is precious.
struct ExcessStore {
  std::map<long, long> counts;  // size -> frequency

  void add(long size);
  bool empty() const { return counts.empty(); }
  long total_weight() const;
  long sample_size(RngStream& rng) const;  // one bootstrap draw, with replacement
};

struct SalesPath {
  std::vector<long> y;
  std::vector<bool> no_excess;  // true where the simulated n_d was zero
  TransactionPath transactions;
};

// Cascade of conditional binomial-logistic DGLMs over exceedance levels,
// plus the excess component.
class CascadeModel {
 public:
  CascadeModel(std::vector<Dglm> levels, ExcessMode mode, ExcessStore initial_store = {});

  int depth() const { return static_cast<int>(levels_.size()); }
  ExcessMode excess_mode() const { return mode_; }
  const std::vector<Dglm>& levels() const { return levels_; }
  const ExcessStore& excess_store() const { return store_; }
  long empty_store_fallbacks() const { return empty_store_fallbacks_; }

  // Level r observes Bin(n[r-1], pi_r) outcome n[r]; zero-trial levels get
  // the missing update. Empirical mode records that day's excess basket sizes.
  void filter_step(const DayDecomposition& day, const Covariates& cov);

  // Joint sales futures driven by transaction paths from the same origin.
  std::vector<SalesPath> forecast_sales_paths(const std::vector<TransactionPath>& transactions,
                                              const std::vector<Covariates>& future,
                                              RngStream& rng,
                                              const FactorBinding* factor = nullptr);

  bool operator==(const CascadeModel& other) const;

 private:
  std::vector<Dglm> levels_;
  ExcessMode mode_;
  ExcessStore store_;
  long empty_store_fallbacks_ = 0;
  bool warned_empty_store_ = false;
};

// Per-day fraction of paths with no excess baskets.
std::vector<double> prob_no_excess(const std::vector<SalesPath>& paths);

// Paths with no excess anywhere over the horizon. Throws std::runtime_error
// when the retained set is empty.
std::vector<SalesPath> conditional_no_excess_paths(const std::vector<SalesPath>& paths);

// Per-day report for the unspecified-excess strategy: excess probability q
// and summaries of the conditional (no-excess) part. Means of the full
// mixture are not identified; the conditional median is a bound on the
// unconditional one when q < 0.5.
struct UnspecifiedSummary {
  std::vector<double> q;             // P(excess) per day
  std::vector<double> cond_mean;     // conditional on that day having no excess
  std::vector<double> cond_median;
  std::vector<double> cond_neg1_median;
  std::vector<long> cond_count;      // retained paths per day
};

UnspecifiedSummary unspecified_mixture_summary(const std::vector<SalesPath>& paths,
                                               ExcessMode mode);

}  // namespace countcast

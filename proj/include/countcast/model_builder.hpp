#pragma once

#include "countcast/config.hpp"
#include "countcast/dcmm.hpp"
#include "countcast/ingest.hpp"
#include "countcast/multiscale.hpp"

namespace countcast {

enum class DcmmTarget { Transactions, Sales };

// Component layouts. Independent DCMM components carry their own weekly
// Fourier block; factor-bound components read the shared factor covariate
// through a loading coordinate instead.
DglmSpec make_item_spec(Family family, const ExperimentConfig& cfg, double rho,
                        bool with_factor);
DglmSpec make_cascade_level_spec(const ExperimentConfig& cfg);
DglmSpec make_aggregate_spec(const ExperimentConfig& cfg);

// Training-window priors: binary level at the clipped logit of the active-day
// proportion with identity covariance; Poisson state from a reference
// least-squares analysis of log(1 + x) on active days.
DcmmModel build_dcmm(const ItemSeries& item, const ExperimentConfig& cfg, DcmmTarget target,
                     double rho, bool with_factor, const AggregateSeries* aggregate = nullptr);

// Cascade level priors at the Laplace-smoothed logit of pooled exceedance
// proportions (or the literal within-level complement when configured), promo
// mean zero, covariance 0.1 I. Empirical mode seeds the excess store with the
// training window's excess baskets.
CascadeModel build_cascade(const ItemSeries& item, const ExperimentConfig& cfg);

// Aggregate DLM prior from a reference analysis of log totals over the
// training window; price standardization constants come from the same window.
AggregateModel build_aggregate(const AggregateSeries& aggregate, const ExperimentConfig& cfg);

// Clipped training proportion: p bounded away from {0,1} by 1/(n+2).
double clipped_proportion(long active, long total);

Covariates day_covariates(const DailyItemRecord& day);

}  // namespace countcast

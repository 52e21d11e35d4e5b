#include "countcast/dbcm.hpp"

#include <algorithm>
#include <cassert>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "countcast/evaluation.hpp"

namespace countcast {

namespace {

void apply_factor(Covariates& day, const FactorBinding* factor, int path, int step) {
  if (factor != nullptr && factor->paths != nullptr) {
    day.set(factor->column, factor->paths->phi(path, step));
  }
}

}  // namespace

void DayDecomposition::validate() const {
  if (b < 0 || e < 0 || y < 0) throw std::invalid_argument("decomposition: negative count");
  if (static_cast<int>(n.size()) != d) {
    throw std::invalid_argument("decomposition: cascade count length != depth");
  }
  long prev = b;
  for (long nr : n) {
    if (nr < 0 || nr > prev) throw std::invalid_argument("decomposition: cascade not non-increasing");
    prev = nr;
  }
  long nd = d > 0 ? n.back() : 0;
  if (nd == 0 && e != 0) throw std::invalid_argument("decomposition: excess without deep baskets");
  if (nd > 0 && e < (d + 1) * nd) {
    throw std::invalid_argument("decomposition: excess below (d+1) per excess basket");
  }
  if (static_cast<long>(excess_sizes.size()) != nd) {
    throw std::invalid_argument("decomposition: excess size list length != n[d]");
  }
  long esum = 0;
  for (long s : excess_sizes) {
    if (s < d + 1) throw std::invalid_argument("decomposition: excess basket not above depth");
    esum += s;
  }
  if (esum != e) throw std::invalid_argument("decomposition: excess sizes do not sum to e");
  if (y != sales_from_counts(b, n, e)) {
    throw std::invalid_argument("decomposition: sales identity violated");
  }
}

DayDecomposition decompose_day(const std::vector<long>& basket_sizes, int depth) {
  if (depth < 1) throw std::invalid_argument("decompose_day: depth must be >= 1");
  DayDecomposition out;
  out.d = depth;
  out.b = static_cast<long>(basket_sizes.size());
  out.n.assign(depth, 0);
  for (long size : basket_sizes) {
    if (size < 1) throw std::invalid_argument("decompose_day: basket size must be positive");
    for (int r = 1; r <= depth; ++r) {
      if (size > r) out.n[r - 1] += 1;
    }
    if (size > depth) {
      out.e += size;
      out.excess_sizes.push_back(size);
    }
    out.y += size;
  }
  std::sort(out.excess_sizes.begin(), out.excess_sizes.end());
  out.validate();
  return out;
}

long sales_from_counts(long b, const std::vector<long>& n, long e) {
  if (b < 0 || e < 0) throw std::invalid_argument("sales_from_counts: negative count");
  if (b == 0) {
    for (long nr : n) {
      if (nr != 0) throw std::invalid_argument("sales_from_counts: counts without transactions");
    }
    if (e != 0) throw std::invalid_argument("sales_from_counts: excess without transactions");
    return 0;
  }
  long prev = b;
  long total = 0;
  for (std::size_t r = 0; r < n.size(); ++r) {
    if (n[r] < 0 || n[r] > prev) {
      throw std::invalid_argument("sales_from_counts: cascade not non-increasing");
    }
    total += static_cast<long>(r + 1) * (prev - n[r]);
    prev = n[r];
  }
  return total + e;
}

void ExcessStore::add(long size) {
  if (size < 2) throw std::invalid_argument("excess store: size must exceed depth >= 1");
  counts[size] += 1;
}

long ExcessStore::total_weight() const {
  long t = 0;
  for (const auto& [size, w] : counts) t += w;
  return t;
}

long ExcessStore::sample_size(RngStream& rng) const {
  long total = total_weight();
  if (total == 0) throw std::logic_error("excess store: sampling from empty store");
  double u = rng.uniform() * static_cast<double>(total);
  double cum = 0.0;
  for (const auto& [size, w] : counts) {
    cum += static_cast<double>(w);
    if (u < cum) return size;
  }
  return counts.rbegin()->first;
}

CascadeModel::CascadeModel(std::vector<Dglm> levels, ExcessMode mode, ExcessStore initial_store)
    : levels_(std::move(levels)), mode_(mode), store_(std::move(initial_store)) {
  if (levels_.empty()) throw std::invalid_argument("cascade: needs at least one level");
  for (const auto& level : levels_) {
    if (level.spec().family != Family::BinomialLogistic) {
      throw std::invalid_argument("cascade: levels must be binomial-logistic");
    }
  }
}

void CascadeModel::filter_step(const DayDecomposition& day, const Covariates& cov) {
  day.validate();
  if (day.d != depth()) throw std::invalid_argument("cascade: depth mismatch");
  long trials = day.b;
  for (int r = 0; r < depth(); ++r) {
    if (trials > 0) {
      Dglm::Step step = levels_[r].prepare(cov, trials);
      levels_[r].observe(step, static_cast<double>(day.n[r]), trials);
    } else {
      levels_[r].step_missing();
    }
    trials = day.n[r];
  }
  if (mode_ == ExcessMode::Empirical) {
    for (long size : day.excess_sizes) store_.add(size);
  }
}

std::vector<SalesPath> CascadeModel::forecast_sales_paths(
    const std::vector<TransactionPath>& transactions, const std::vector<Covariates>& future,
    RngStream& rng, const FactorBinding* factor) {
  if (transactions.empty()) throw std::invalid_argument("forecast: no transaction paths");
  const int horizon = static_cast<int>(transactions.front().b.size());
  if (static_cast<int>(future.size()) < horizon) {
    throw std::invalid_argument("forecast: future covariates shorter than horizon");
  }
  const int d = depth();

  std::vector<SalesPath> out(transactions.size());
  for (std::size_t p = 0; p < transactions.size(); ++p) {
    RngStream stream = rng.substream(0x5a1e5 + static_cast<std::uint64_t>(p));
    SalesPath& path = out[p];
    path.transactions = transactions[p];
    path.y.assign(horizon, 0);
    path.no_excess.assign(horizon, true);

    std::vector<Dglm> levels = levels_;
    std::vector<long> n(d, 0);
    for (int j = 0; j < horizon; ++j) {
      Covariates day = future[j];
      apply_factor(day, factor, static_cast<int>(p), j);
      long trials = path.transactions.b[j];
      std::fill(n.begin(), n.end(), 0);
      for (int r = 0; r < d; ++r) {
        if (trials > 0) {
          Dglm::Step step = levels[r].prepare(day, trials);
          const auto* bb = std::get_if<BetaBinomial>(&step.predictive);
          long hits = draw_beta_binomial(stream, trials, bb->alpha, bb->beta);
          levels[r].observe(step, static_cast<double>(hits), trials);
          n[r] = hits;
        } else {
          levels[r].step_missing();
        }
        trials = n[r];
      }

      long e = 0;
      if (n[d - 1] > 0) {
        path.no_excess[j] = false;
        if (mode_ == ExcessMode::Empirical) {
          if (store_.empty()) {
            // Cold start: minimal excess keeps the simulated total defined.
            e = static_cast<long>(d + 1) * n[d - 1];
            empty_store_fallbacks_ += 1;
            if (!warned_empty_store_) {
              warned_empty_store_ = true;
              std::cerr << "warning: empty excess store; using minimal excess "
                           "(d+1) per excess basket\n";
            }
          } else {
            for (long i = 0; i < n[d - 1]; ++i) e += store_.sample_size(stream);
          }
        }
        // Unspecified mode: e stays 0 and the day is flagged; sales on such
        // days are conditional values, not draws from the full mixture.
      }
      path.y[j] = sales_from_counts(path.transactions.b[j], n, e);
      assert(path.y[j] >= path.transactions.b[j]);
    }
  }
  return out;
}

bool CascadeModel::operator==(const CascadeModel& other) const {
  return levels_ == other.levels_ && mode_ == other.mode_ &&
         store_.counts == other.store_.counts;
}

std::vector<double> prob_no_excess(const std::vector<SalesPath>& paths) {
  if (paths.empty()) throw std::invalid_argument("prob_no_excess: no paths");
  const std::size_t horizon = paths.front().no_excess.size();
  std::vector<double> out(horizon, 0.0);
  for (const auto& path : paths) {
    for (std::size_t j = 0; j < horizon; ++j) out[j] += path.no_excess[j] ? 1.0 : 0.0;
  }
  for (double& v : out) v /= static_cast<double>(paths.size());
  return out;
}

std::vector<SalesPath> conditional_no_excess_paths(const std::vector<SalesPath>& paths) {
  std::vector<SalesPath> kept;
  for (const auto& path : paths) {
    if (std::all_of(path.no_excess.begin(), path.no_excess.end(), [](bool v) { return v; })) {
      kept.push_back(path);
    }
  }
  if (kept.empty()) {
    throw std::runtime_error(
        "no-excess conditioning retained zero paths; increase the path count");
  }
  return kept;
}

UnspecifiedSummary unspecified_mixture_summary(const std::vector<SalesPath>& paths,
                                               ExcessMode mode) {
  if (mode != ExcessMode::Unspecified) {
    throw std::invalid_argument("mixture summary applies to the unspecified excess mode");
  }
  if (paths.empty()) throw std::invalid_argument("mixture summary: no paths");
  const std::size_t horizon = paths.front().no_excess.size();
  UnspecifiedSummary out;
  out.q.resize(horizon);
  out.cond_mean.resize(horizon);
  out.cond_median.resize(horizon);
  out.cond_neg1_median.resize(horizon);
  out.cond_count.resize(horizon);
  std::vector<double> p_no = prob_no_excess(paths);
  std::vector<long> day;
  for (std::size_t j = 0; j < horizon; ++j) {
    out.q[j] = 1.0 - p_no[j];
    day.clear();
    for (const auto& path : paths) {
      if (path.no_excess[j]) day.push_back(path.y[j]);
    }
    out.cond_count[j] = static_cast<long>(day.size());
    if (day.empty()) {
      out.cond_mean[j] = out.cond_median[j] = out.cond_neg1_median[j] =
          std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    out.cond_mean[j] = point_forecast(day, PointRule::Mean);
    out.cond_median[j] = point_forecast(day, PointRule::Median);
    bool any_positive = std::any_of(day.begin(), day.end(), [](long v) { return v > 0; });
    out.cond_neg1_median[j] = any_positive
                                  ? point_forecast(day, PointRule::Neg1Median)
                                  : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace countcast

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "countcast/conjugate.hpp"
#include "countcast/distributions.hpp"

namespace countcast {

enum class Family { BinomialLogistic, PoissonLoglinear, Normal };

enum class ComponentKind { Intercept, LinearTrend, Covariate, Fourier };

// One block of the state vector. Fourier blocks are 2x2 rotations by
// 2*pi*harmonic/period; LinearTrend is the usual level/slope pair.
struct SpecComponent {
  std::string name;
  ComponentKind kind = ComponentKind::Intercept;
  std::string column;  // Covariate only: name of the covariate it reads
  int period = 0;      // Fourier only
  int harmonic = 0;    // Fourier only
  int discount_group = 0;
};

// Small named covariate set for one day. Linear scan: these hold a handful
// of entries (price, promo, factor).
struct Covariates {
  std::vector<std::pair<std::string, double>> kv;

  void set(const std::string& name, double value);
  double at(const std::string& name) const;  // throws if missing
  bool has(const std::string& name) const;
};

struct DglmSpec {
  Family family = Family::PoissonLoglinear;
  std::vector<SpecComponent> layout;
  std::map<int, double> discounts;   // group id -> delta in (0,1]
  double rho = 1.0;                  // random-effects discount
  double volatility_discount = 1.0;  // normal family only

  int state_dim() const;
  Eigen::MatrixXd evolution_matrix() const;
  Eigen::VectorXd regression_vector(const Covariates& day) const;
  // Contiguous (start, length, delta) spans, one per discount group.
  std::vector<std::tuple<int, int, double>> discount_spans() const;
  std::uint64_t hash() const;
  void validate() const;  // throws std::invalid_argument on a bad spec
};

struct StateMoments {
  Eigen::VectorXd m;
  Eigen::MatrixXd C;

  int dim() const { return static_cast<int>(m.size()); }
};

// Gamma posterior on the observational precision: dof n, point estimate s.
struct VolatilityState {
  double n = 1.0;
  double s = 1.0;
};

struct RandomEffectContext {
  double q0 = 0.0;  // baseline predictor variance F'RF
  double v = 0.0;   // day-effect variance q0(1-rho)/rho
};

// --- Core evolve/predict/update cycle -------------------------------------

// Discount evolution: a = G m, P = G C G', R has diagonal group blocks P_j/delta_j
// with off-diagonal blocks of P unchanged.
StateMoments evolve(const StateMoments& posterior, const DglmSpec& spec);

std::pair<PredictorMoments, RandomEffectContext> predictor_moments(
    const StateMoments& prior, const Eigen::VectorXd& F, double rho);

// Conjugate 1-step predictive. `trials` is used by the binomial family only;
// `vol` by the normal family only.
Distribution forecast_1step(const PredictorMoments& pm, const DglmSpec& spec,
                            long trials = 1, const VolatilityState& vol = {});

// Linear Bayes posterior from the conjugate update, with the random-effects
// inflated q throughout. `trials` applies to the binomial family.
StateMoments update(const StateMoments& prior, const Eigen::VectorXd& F, double y,
                    const DglmSpec& spec, const RandomEffectContext& re,
                    long trials = 1);

// No observation: posterior equals the evolved prior.
StateMoments update_missing(const StateMoments& prior);

// --- Stateful model instance ----------------------------------------------

// Owns the filtered posterior of one DGLM. Value type: path simulation runs on
// copies and never touches the filtered instance.
class Dglm {
 public:
  Dglm() = default;
  Dglm(DglmSpec spec, StateMoments prior, VolatilityState vol = {});

  const DglmSpec& spec() const { return spec_; }
  const StateMoments& state() const { return state_; }
  const VolatilityState& volatility() const { return vol_; }

  // Quantities of one evolve/predict step, reusable for update.
  struct Step {
    StateMoments prior;
    Eigen::VectorXd F;
    PredictorMoments pm;
    RandomEffectContext re;
    Distribution predictive;
  };

  // Evolve + conjugate predict. Does not change the stored state. For the
  // normal family the predictive is Student-t under the beta-discounted dof.
  Step prepare(const Covariates& day, long trials = 1) const;

  // Commit an observation (or none) against a prepared step. The normal
  // family runs the Kalman/volatility-discount update; observe_missing still
  // ages the volatility dof there.
  void observe(const Step& step, double y, long trials = 1);
  void observe_missing(const Step& step);

  // Missing day without a prepared step: evolve only, no conjugate solve.
  void step_missing();

  // Normal family: full evolve/predict/update cycle. Returns the Student-t
  // 1-step predictive evaluated before the update.
  Distribution dlm_step(const Covariates& day, double y);

  // Intervention hook: replace the filtered moments in place.
  void set_state(StateMoments s) { state_ = std::move(s); }
  void set_volatility(VolatilityState v) { vol_ = v; }

  bool operator==(const Dglm& other) const;

  std::string to_json() const;
  static Dglm from_json(const std::string& text, const DglmSpec& spec);

 private:
  DglmSpec spec_;
  StateMoments state_;
  VolatilityState vol_;
};

}  // namespace countcast

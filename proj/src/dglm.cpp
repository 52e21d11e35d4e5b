#include "countcast/dglm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "countcast/special_functions.hpp"
#include "json.hpp"

namespace countcast {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegenerateQ = 1e-12;

int component_dim(const SpecComponent& c) {
  switch (c.kind) {
    case ComponentKind::Intercept:
    case ComponentKind::Covariate:
      return 1;
    case ComponentKind::LinearTrend:
    case ComponentKind::Fourier:
      return 2;
  }
  return 0;
}

void symmetrize(Eigen::MatrixXd& C) { C = ((C + C.transpose()) * 0.5).eval(); }

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a_str(std::uint64_t h, const std::string& s) {
  return fnv1a(h, s.data(), s.size());
}

std::uint64_t fnv1a_double(std::uint64_t h, double v) {
  return fnv1a(h, &v, sizeof(v));
}

}  // namespace

// --- Covariates -------------------------------------------------------------

void Covariates::set(const std::string& name, double value) {
  for (auto& [k, v] : kv) {
    if (k == name) {
      v = value;
      return;
    }
  }
  kv.emplace_back(name, value);
}

double Covariates::at(const std::string& name) const {
  for (const auto& [k, v] : kv) {
    if (k == name) return v;
  }
  throw std::invalid_argument("missing covariate: " + name);
}

bool Covariates::has(const std::string& name) const {
  for (const auto& [k, v] : kv) {
    if (k == name) return true;
  }
  return false;
}

// --- DglmSpec ----------------------------------------------------------------

int DglmSpec::state_dim() const {
  int d = 0;
  for (const auto& c : layout) d += component_dim(c);
  return d;
}

void DglmSpec::validate() const {
  if (layout.empty()) throw std::invalid_argument("spec has no components");
  for (const auto& c : layout) {
    if (c.kind == ComponentKind::Fourier) {
      if (c.period < 3 || c.harmonic < 1 || 2 * c.harmonic >= c.period) {
        throw std::invalid_argument("fourier component needs 1 <= harmonic < period/2");
      }
    }
    if (!discounts.count(c.discount_group)) {
      throw std::invalid_argument("component '" + c.name + "' has no discount entry");
    }
  }
  for (const auto& [g, delta] : discounts) {
    if (!(delta > 0.0 && delta <= 1.0)) {
      throw std::invalid_argument("discount factors must lie in (0,1]");
    }
  }
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in (0,1]");
  if (!(volatility_discount > 0.0 && volatility_discount <= 1.0)) {
    throw std::invalid_argument("volatility discount must lie in (0,1]");
  }
  discount_spans();  // throws if a group is non-contiguous
}

Eigen::MatrixXd DglmSpec::evolution_matrix() const {
  int d = state_dim();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, d);
  int at = 0;
  for (const auto& c : layout) {
    switch (c.kind) {
      case ComponentKind::Intercept:
      case ComponentKind::Covariate:
        G(at, at) = 1.0;
        at += 1;
        break;
      case ComponentKind::LinearTrend:
        G(at, at) = 1.0;
        G(at, at + 1) = 1.0;
        G(at + 1, at + 1) = 1.0;
        at += 2;
        break;
      case ComponentKind::Fourier: {
        double w = 2.0 * kPi * c.harmonic / c.period;
        G(at, at) = std::cos(w);
        G(at, at + 1) = std::sin(w);
        G(at + 1, at) = -std::sin(w);
        G(at + 1, at + 1) = std::cos(w);
        at += 2;
        break;
      }
    }
  }
  return G;
}

Eigen::VectorXd DglmSpec::regression_vector(const Covariates& day) const {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(state_dim());
  int at = 0;
  for (const auto& c : layout) {
    switch (c.kind) {
      case ComponentKind::Intercept:
        F(at++) = 1.0;
        break;
      case ComponentKind::Covariate:
        F(at++) = day.at(c.column);
        break;
      case ComponentKind::LinearTrend:
      case ComponentKind::Fourier:
        F(at) = 1.0;
        at += 2;
        break;
    }
  }
  return F;
}

std::vector<std::tuple<int, int, double>> DglmSpec::discount_spans() const {
  std::vector<std::tuple<int, int, double>> spans;
  int at = 0;
  int last_group = 0;
  bool open = false;
  std::vector<int> seen;
  for (const auto& c : layout) {
    int d = component_dim(c);
    if (open && c.discount_group == last_group) {
      std::get<1>(spans.back()) += d;
    } else {
      if (std::find(seen.begin(), seen.end(), c.discount_group) != seen.end()) {
        throw std::invalid_argument("discount group coordinates must be contiguous");
      }
      seen.push_back(c.discount_group);
      spans.emplace_back(at, d, discounts.at(c.discount_group));
      last_group = c.discount_group;
      open = true;
    }
    at += d;
  }
  return spans;
}

std::uint64_t DglmSpec::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  h = fnv1a_double(h, static_cast<double>(static_cast<int>(family)));
  for (const auto& c : layout) {
    h = fnv1a_str(h, c.name);
    h = fnv1a_double(h, static_cast<double>(static_cast<int>(c.kind)));
    h = fnv1a_str(h, c.column);
    h = fnv1a_double(h, c.period);
    h = fnv1a_double(h, c.harmonic);
    h = fnv1a_double(h, c.discount_group);
  }
  for (const auto& [g, delta] : discounts) {
    h = fnv1a_double(h, g);
    h = fnv1a_double(h, delta);
  }
  h = fnv1a_double(h, rho);
  h = fnv1a_double(h, volatility_discount);
  return h;
}

// --- Core cycle --------------------------------------------------------------

StateMoments evolve(const StateMoments& posterior, const DglmSpec& spec) {
  if (posterior.dim() != spec.state_dim()) {
    throw std::invalid_argument("evolve: state dimension does not match spec");
  }
  Eigen::MatrixXd G = spec.evolution_matrix();
  StateMoments prior;
  prior.m = G * posterior.m;
  Eigen::MatrixXd P = G * posterior.C * G.transpose();
  prior.C = P;
  for (const auto& [start, len, delta] : spec.discount_spans()) {
    prior.C.block(start, start, len, len) = P.block(start, start, len, len) / delta;
  }
  symmetrize(prior.C);
  return prior;
}

std::pair<PredictorMoments, RandomEffectContext> predictor_moments(
    const StateMoments& prior, const Eigen::VectorXd& F, double rho) {
  if (F.size() != prior.m.size()) {
    throw std::invalid_argument("predictor_moments: dimension mismatch");
  }
  double f = F.dot(prior.m);
  double q0 = F.dot(prior.C * F);
  if (!(q0 > kDegenerateQ)) {
    throw std::domain_error("predictor_moments: degenerate prior variance");
  }
  PredictorMoments pm{f, q0 / rho};
  RandomEffectContext re{q0, q0 * (1.0 - rho) / rho};
  return {pm, re};
}

Distribution forecast_1step(const PredictorMoments& pm, const DglmSpec& spec,
                            long trials, const VolatilityState& vol) {
  switch (spec.family) {
    case Family::BinomialLogistic: {
      ConjugateParams cp = solve_beta_from_moments(pm);
      return BetaBinomial{trials, cp.alpha, cp.beta};
    }
    case Family::PoissonLoglinear: {
      ConjugateParams cp = solve_gamma_from_moments(pm);
      return NegativeBinomial{cp.alpha, cp.beta / (1.0 + cp.beta)};
    }
    case Family::Normal:
      // pm.q is the baseline q0 here (no random effects on the DLM path).
      return StudentT{vol.n, pm.f, std::sqrt(pm.q + vol.s)};
  }
  throw std::logic_error("unreachable");
}

StateMoments update(const StateMoments& prior, const Eigen::VectorXd& F, double y,
                    const DglmSpec& spec, const RandomEffectContext& re,
                    long trials) {
  double f = F.dot(prior.m);
  double q = (re.q0 + re.v);  // q0 / rho
  double g = 0.0, p = 0.0;
  switch (spec.family) {
    case Family::BinomialLogistic: {
      if (y < 0.0 || y > static_cast<double>(trials)) {
        throw std::invalid_argument("update: binomial outcome outside [0, trials]");
      }
      ConjugateParams cp = solve_beta_from_moments({f, q});
      double a1 = cp.alpha + y;
      double b1 = cp.beta + static_cast<double>(trials) - y;
      g = digamma(a1) - digamma(b1);
      p = trigamma(a1) + trigamma(b1);
      break;
    }
    case Family::PoissonLoglinear: {
      if (y < 0.0) throw std::invalid_argument("update: negative count");
      ConjugateParams cp = solve_gamma_from_moments({f, q});
      double a1 = cp.alpha + y;
      double b1 = cp.beta + 1.0;
      g = digamma(a1) - std::log(b1);
      p = trigamma(a1);
      break;
    }
    case Family::Normal:
      throw std::invalid_argument("update: normal family uses dlm_step");
  }
  StateMoments post;
  Eigen::VectorXd RF = prior.C * F;
  post.m = prior.m + RF * ((g - f) / q);
  post.C = prior.C - RF * RF.transpose() * ((1.0 - p / q) / q);
  symmetrize(post.C);
  return post;
}

StateMoments update_missing(const StateMoments& prior) { return prior; }

// --- Dglm --------------------------------------------------------------------

Dglm::Dglm(DglmSpec spec, StateMoments prior, VolatilityState vol)
    : spec_(std::move(spec)), state_(std::move(prior)), vol_(vol) {
  spec_.validate();
  if (state_.dim() != spec_.state_dim()) {
    throw std::invalid_argument("Dglm: prior dimension does not match spec");
  }
}

Dglm::Step Dglm::prepare(const Covariates& day, long trials) const {
  Step step;
  step.prior = evolve(state_, spec_);
  step.F = spec_.regression_vector(day);
  if (spec_.family == Family::Normal) {
    auto [pm, re] = predictor_moments(step.prior, step.F, 1.0);
    step.pm = pm;
    step.re = re;
    VolatilityState aged{vol_.n * spec_.volatility_discount, vol_.s};
    step.predictive = forecast_1step(pm, spec_, trials, aged);
  } else {
    auto [pm, re] = predictor_moments(step.prior, step.F, spec_.rho);
    step.pm = pm;
    step.re = re;
    step.predictive = forecast_1step(pm, spec_, trials);
  }
  return step;
}

void Dglm::observe(const Step& step, double y, long trials) {
  if (spec_.family == Family::Normal) {
    double n_aged = vol_.n * spec_.volatility_discount;
    double e = y - step.pm.f;
    double Q = step.re.q0 + vol_.s;
    Eigen::VectorXd A = (step.prior.C * step.F) / Q;
    double n_new = n_aged + 1.0;
    double s_new = vol_.s * (n_aged + e * e / Q) / n_new;
    StateMoments post;
    post.m = step.prior.m + A * e;
    post.C = (step.prior.C - A * A.transpose() * Q) * (s_new / vol_.s);
    symmetrize(post.C);
    state_ = std::move(post);
    vol_ = {n_new, s_new};
  } else {
    state_ = update(step.prior, step.F, y, spec_, step.re, trials);
  }
}

void Dglm::observe_missing(const Step& step) {
  state_ = update_missing(step.prior);
  if (spec_.family == Family::Normal) vol_.n *= spec_.volatility_discount;
}

void Dglm::step_missing() {
  state_ = evolve(state_, spec_);
  if (spec_.family == Family::Normal) vol_.n *= spec_.volatility_discount;
}

Distribution Dglm::dlm_step(const Covariates& day, double y) {
  if (spec_.family != Family::Normal) {
    throw std::invalid_argument("dlm_step: normal family only");
  }
  Step step = prepare(day);
  Distribution predictive = step.predictive;
  observe(step, y);
  return predictive;
}

bool Dglm::operator==(const Dglm& other) const {
  return spec_.hash() == other.spec_.hash() && state_.m == other.state_.m &&
         state_.C == other.state_.C && vol_.n == other.vol_.n && vol_.s == other.vol_.s;
}

std::string Dglm::to_json() const {
  nlohmann::json j;
  std::ostringstream hash;
  hash << spec_.hash();
  j["spec_hash"] = hash.str();
  j["dim"] = state_.dim();
  j["m"] = std::vector<double>(state_.m.data(), state_.m.data() + state_.m.size());
  std::vector<double> flat(state_.C.size());
  Eigen::Map<Eigen::MatrixXd>(flat.data(), state_.C.rows(), state_.C.cols()) = state_.C;
  j["C"] = flat;
  j["vol"] = {{"n", vol_.n}, {"s", vol_.s}};
  return j.dump();
}

Dglm Dglm::from_json(const std::string& text, const DglmSpec& spec) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::ostringstream want;
  want << spec.hash();
  if (j.at("spec_hash").get<std::string>() != want.str()) {
    throw std::invalid_argument("checkpoint spec hash mismatch");
  }
  int dim = j.at("dim").get<int>();
  StateMoments sm;
  auto mv = j.at("m").get<std::vector<double>>();
  auto cv = j.at("C").get<std::vector<double>>();
  if (static_cast<int>(mv.size()) != dim || static_cast<int>(cv.size()) != dim * dim) {
    throw std::invalid_argument("checkpoint dimension mismatch");
  }
  sm.m = Eigen::Map<Eigen::VectorXd>(mv.data(), dim);
  sm.C = Eigen::Map<Eigen::MatrixXd>(cv.data(), dim, dim);
  VolatilityState vol{j.at("vol").at("n").get<double>(), j.at("vol").at("s").get<double>()};
  return Dglm(spec, std::move(sm), vol);
}

}  // namespace countcast

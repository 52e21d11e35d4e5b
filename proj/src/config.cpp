#include "countcast/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace countcast {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + v + "'");
  }
}

long to_long(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    long d = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + v + "'");
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config key '" + key + "': bad boolean '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (training_days < 1 || fit_days < 0 || forecast_days < 0) {
    throw std::invalid_argument("config: period lengths must be non-negative (training >= 1)");
  }
  if (horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
  if (paths < 1) throw std::invalid_argument("config: paths must be >= 1");
  if (cascade_depth < 1) throw std::invalid_argument("config: cascade depth must be >= 1");
  if (rho_grid.empty()) throw std::invalid_argument("config: rho grid is empty");
  for (double r : rho_grid) {
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("config: rho outside (0,1]");
  }
  for (double d : {discount_poisson, discount_bernoulli, discount_cascade_level,
                   discount_cascade_promo, discount_agg_trend, discount_agg_regression,
                   discount_agg_seasonal, volatility_discount, rho_binary}) {
    if (!(d > 0.0 && d <= 1.0)) throw std::invalid_argument("config: discount outside (0,1]");
  }
  if (weekly_harmonics < 1 || 2 * weekly_harmonics >= 7 + 2) {
    throw std::invalid_argument("config: weekly harmonics must be 1..3");
  }
  if (yearly_harmonics < 0 || 2 * yearly_harmonics >= 365) {
    throw std::invalid_argument("config: bad yearly harmonic count");
  }
  if (solver_max_iter < 1 || !(solver_tol > 0.0)) {
    throw std::invalid_argument("config: bad solver controls");
  }
}

void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "experiment.training_days") cfg.training_days = static_cast<int>(to_long(v, key));
  else if (key == "experiment.fit_days") cfg.fit_days = static_cast<int>(to_long(v, key));
  else if (key == "experiment.forecast_days") cfg.forecast_days = static_cast<int>(to_long(v, key));
  else if (key == "experiment.horizon") cfg.horizon = static_cast<int>(to_long(v, key));
  else if (key == "experiment.paths") cfg.paths = static_cast<int>(to_long(v, key));
  else if (key == "experiment.seed") cfg.seed = static_cast<std::uint64_t>(to_long(v, key));
  else if (key == "experiment.threads") cfg.threads = static_cast<int>(to_long(v, key));
  else if (key == "experiment.emit_samples") cfg.emit_samples = to_bool(v, key);
  else if (key == "experiment.items") cfg.items = split_list(v);
  else if (key == "experiment.rho_grid") {
    cfg.rho_grid.clear();
    for (const auto& part : split_list(v)) cfg.rho_grid.push_back(to_double(part, key));
  } else if (key == "experiment.coverage_levels") {
    cfg.coverage_levels.clear();
    for (const auto& part : split_list(v)) cfg.coverage_levels.push_back(to_double(part, key));
  }
  else if (key == "model.rho_binary") cfg.rho_binary = to_double(v, key);
  else if (key == "model.cascade_depth") cfg.cascade_depth = static_cast<int>(to_long(v, key));
  else if (key == "model.excess_mode") {
    if (v == "empirical") cfg.excess_mode = ExcessMode::Empirical;
    else if (v == "unspecified") cfg.excess_mode = ExcessMode::Unspecified;
    else throw std::invalid_argument("config: excess_mode must be empirical|unspecified");
  }
  else if (key == "model.cascade_prior_literal") cfg.cascade_prior_literal = to_bool(v, key);
  else if (key == "model.run_benchmark") cfg.run_benchmark = to_bool(v, key);
  else if (key == "model.run_independent") cfg.run_independent = to_bool(v, key);
  else if (key == "model.run_multiscale") cfg.run_multiscale = to_bool(v, key);
  else if (key == "model.weekly_harmonics") cfg.weekly_harmonics = static_cast<int>(to_long(v, key));
  else if (key == "model.yearly_harmonics") cfg.yearly_harmonics = static_cast<int>(to_long(v, key));
  else if (key == "model.loading_prior_mean") cfg.loading_prior_mean = to_double(v, key);
  else if (key == "model.loading_prior_var") cfg.loading_prior_var = to_double(v, key);
  else if (key == "discount.poisson") cfg.discount_poisson = to_double(v, key);
  else if (key == "discount.bernoulli") cfg.discount_bernoulli = to_double(v, key);
  else if (key == "discount.cascade_level") cfg.discount_cascade_level = to_double(v, key);
  else if (key == "discount.cascade_promo") cfg.discount_cascade_promo = to_double(v, key);
  else if (key == "discount.agg_trend") cfg.discount_agg_trend = to_double(v, key);
  else if (key == "discount.agg_regression") cfg.discount_agg_regression = to_double(v, key);
  else if (key == "discount.agg_seasonal") cfg.discount_agg_seasonal = to_double(v, key);
  else if (key == "discount.volatility") cfg.volatility_discount = to_double(v, key);
  else if (key == "solver.max_iter") cfg.solver_max_iter = static_cast<int>(to_long(v, key));
  else if (key == "solver.tol") cfg.solver_tol = to_double(v, key);
  else if (key == "data.future_covariates") cfg.future_covariates_file = v;
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string describe_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "experiment.training_days = " << cfg.training_days << '\n'
      << "experiment.fit_days = " << cfg.fit_days << '\n'
      << "experiment.forecast_days = " << cfg.forecast_days << '\n'
      << "experiment.horizon = " << cfg.horizon << '\n'
      << "experiment.paths = " << cfg.paths << '\n'
      << "experiment.seed = " << cfg.seed << '\n'
      << "experiment.rho_grid =";
  for (std::size_t i = 0; i < cfg.rho_grid.size(); ++i) {
    out << (i ? "," : " ") << cfg.rho_grid[i];
  }
  out << '\n'
      << "model.cascade_depth = " << cfg.cascade_depth << '\n'
      << "model.excess_mode = "
      << (cfg.excess_mode == ExcessMode::Empirical ? "empirical" : "unspecified") << '\n'
      << "model.rho_binary = " << cfg.rho_binary << '\n'
      << "discount.poisson = " << cfg.discount_poisson << '\n'
      << "discount.bernoulli = " << cfg.discount_bernoulli << '\n'
      << "discount.cascade_level = " << cfg.discount_cascade_level << '\n'
      << "discount.cascade_promo = " << cfg.discount_cascade_promo << '\n'
      << "discount.agg_trend = " << cfg.discount_agg_trend << '\n'
      << "discount.agg_seasonal = " << cfg.discount_agg_seasonal << '\n'
      << "discount.volatility = " << cfg.volatility_discount << '\n'
      << "solver.max_iter = " << cfg.solver_max_iter << '\n'
      << "solver.tol = " << cfg.solver_tol << '\n';
  return out.str();
}

}  // namespace countcast

// Command-line driver: synthetic data generation, filtering, forecasting,
// evaluation, and the rolling-origin experiment.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "countcast/experiment.hpp"
#include "countcast/synthetic.hpp"

namespace cc = countcast;
namespace fs = std::filesystem;

namespace {

struct GlobalArgs {
  std::string config_file;
  std::string output = "out";
  std::vector<std::string> config_overrides;
  long seed = -1;
  int paths = -1;
  int horizon = -1;
  std::string items;
};

cc::ExperimentConfig resolve_config(const GlobalArgs& args) {
  cc::ExperimentConfig cfg;
  if (!args.config_file.empty()) cfg = cc::load_config_file(args.config_file);
  for (const auto& kv : args.config_overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::runtime_error("--set expects key=value");
    cc::apply_config_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (args.paths > 0) cfg.paths = args.paths;
  if (args.horizon > 0) cfg.horizon = args.horizon;
  if (!args.items.empty()) {
    cfg.items.clear();
    std::stringstream ss(args.items);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) cfg.items.push_back(part);
    }
  }
  cfg.validate();
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

int cmd_simulate(const GlobalArgs& args, const std::string& scenario_name, int items,
                 int days) {
  cc::ExperimentConfig cfg = resolve_config(args);
  cc::ScenarioConfig scenario;
  if (scenario_name == "item-a") {
    scenario = cc::item_a_scenario();
  } else if (scenario_name == "shared-factor") {
    scenario = cc::shared_factor_scenario();
  } else {
    throw std::runtime_error("unknown scenario '" + scenario_name + "'");
  }
  if (items > 0) scenario.n_items = items;
  if (days > 0) scenario.days = days;

  cc::SyntheticOutput out = cc::generate_synthetic(scenario, cc::RngStream(cfg.seed, 1));
  fs::create_directories(args.output);
  {
    std::ofstream csv(args.output + "/transactions.csv", std::ios::binary);
    cc::write_transactions_csv(csv, out.rows);
  }
  write_file(args.output + "/truth.json", out.truth_json());
  std::cout << "wrote " << out.rows.size() << " transactions for " << scenario.n_items
            << " item(s) to " << args.output << "\n";
  return 0;
}

int cmd_fit(const GlobalArgs& args, const std::string& data_file) {
  cc::ExperimentConfig cfg = resolve_config(args);
  cc::solver_options() = {cfg.solver_max_iter, cfg.solver_tol};
  cc::IngestResult data = cc::ingest_file(data_file, cfg.cascade_depth);
  const int fit_end = std::min<int>(cfg.training_days + cfg.fit_days,
                                    static_cast<int>(data.aggregate.total_transactions.size()));

  fs::create_directories(args.output + "/checkpoints");
  std::optional<cc::AggregateModel> agg;
  std::vector<double> factor_mean(fit_end, 0.0);
  if (cfg.run_multiscale) {
    agg = cc::build_aggregate(data.aggregate, cfg);
    for (int t = cfg.training_days; t < fit_end; ++t) {
      factor_mean[t] = agg->next_day_factor_mean(data.aggregate.avg_price[t]);
      agg->update(data.aggregate.total_transactions[t], data.aggregate.avg_price[t]);
    }
    write_file(args.output + "/checkpoints/aggregate.json", agg->dlm().to_json());
  }

  cc::RngStream rng(cfg.seed, 7);
  for (const auto& item : data.items) {
    if (!cfg.items.empty() &&
        std::find(cfg.items.begin(), cfg.items.end(), item.item_id) == cfg.items.end()) {
      continue;
    }
    bool with_factor = cfg.run_multiscale;
    cc::DcmmModel dcmm = cc::build_dcmm(item, cfg, cc::DcmmTarget::Transactions,
                                        cfg.rho_grid.front(), with_factor, &data.aggregate);
    cc::CascadeModel cascade = cc::build_cascade(item, cfg);
    for (int t = cfg.training_days; t < fit_end; ++t) {
      cc::Covariates cov = cc::day_covariates(item.days[t]);
      if (with_factor) cov.set("factor", factor_mean[t]);
      dcmm.filter_step(item.days[t].decomposition.b, cov, rng);
      cascade.filter_step(item.days[t].decomposition, cov);
    }
    const std::string base = args.output + "/checkpoints/" + item.item_id;
    write_file(base + "_binary.json", dcmm.binary().to_json());
    write_file(base + "_count.json", dcmm.count().to_json());
    for (int r = 0; r < cascade.depth(); ++r) {
      write_file(base + "_cascade" + std::to_string(r + 1) + ".json",
                 cascade.levels()[r].to_json());
    }
    std::cout << "fitted " << item.item_id << " through day " << fit_end - 1 << "\n";
  }
  return 0;
}

int cmd_forecast(const GlobalArgs& args, const std::string& data_file, int origin,
                 double rho) {
  cc::ExperimentConfig cfg = resolve_config(args);
  cc::IngestResult data = cc::ingest_file(data_file, cfg.cascade_depth);
  if (origin < 0) origin = cfg.training_days + cfg.fit_days - 1;
  auto rows = cc::forecast_at_origin(cfg, data, origin, rho);
  fs::create_directories(args.output);
  cc::write_sample_rows(args.output + "/samples.csv", rows);
  std::cout << "wrote " << rows.size() << " sample rows at origin " << origin << " to "
            << args.output << "/samples.csv\n";
  return 0;
}

int cmd_evaluate(const GlobalArgs& args, const std::string& samples_file,
                 const std::string& data_file) {
  cc::ExperimentConfig cfg = resolve_config(args);
  cc::IngestResult data = cc::ingest_file(data_file, cfg.cascade_depth);

  std::ifstream in(samples_file);
  if (!in) throw std::runtime_error("cannot open " + samples_file);
  std::string line;
  std::getline(in, line);  // header
  std::vector<cc::ForecastSampleRow> rows;
  std::map<std::pair<std::string, std::string>, bool> combos;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    cc::ForecastSampleRow row;
    std::string field;
    std::getline(ss, row.item, ',');
    std::getline(ss, row.model, ',');
    std::getline(ss, field, ',');
    row.origin = std::stoi(field);
    std::getline(ss, field, ',');
    row.horizon = std::stoi(field);
    std::getline(ss, field, ',');
    row.path = std::stoi(field);
    std::getline(ss, field, ',');
    row.y = std::stol(field);
    std::getline(ss, field, ',');
    row.no_excess = field == "1";
    rows.push_back(row);
    combos[{row.item, row.model}] = true;
  }

  fs::create_directories(args.output);
  std::ostringstream metrics;
  metrics << "item,model,horizon,metric,value\n";
  for (const auto& [combo, unused] : combos) {
    auto records = cc::records_from_samples(rows, data, combo.first, combo.second);
    if (records.empty()) continue;
    int max_h = 0;
    for (const auto& r : records) max_h = std::max(max_h, r.horizon);
    cc::MetricTable mad_t = cc::mad(records, max_h);
    cc::MetricTable mape_t = cc::mape(records, max_h);
    for (int h = 0; h < max_h; ++h) {
      metrics << combo.first << ',' << combo.second << ',' << h + 1 << ",mad,"
              << mad_t.by_horizon[h] << '\n';
      metrics << combo.first << ',' << combo.second << ',' << h + 1 << ",mape,"
              << mape_t.by_horizon[h] << '\n';
    }
  }
  write_file(args.output + "/metrics.csv", metrics.str());
  std::cout << "wrote " << args.output << "/metrics.csv\n";
  return 0;
}

int cmd_run(const GlobalArgs& args, const std::string& data_file) {
  cc::ExperimentConfig cfg = resolve_config(args);
  cc::IngestResult data = cc::ingest_file(data_file, cfg.cascade_depth);
  cc::ExperimentResult result = cc::run_experiment_to_dir(cfg, data, args.output);
  long ok = 0, failed = 0;
  for (const auto& v : result.variants) (v.ok ? ok : failed) += 1;
  std::cout << "experiment complete: " << ok << " variant runs ok, " << failed
            << " failed; reports in " << args.output << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian transaction-sales forecasting"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_file, "config file (key = value lines)");
  app.add_option("--set", args.config_overrides, "override one config key (key=value)");
  app.add_option("--seed", args.seed, "override experiment.seed");
  app.add_option("--paths", args.paths, "override experiment.paths");
  app.add_option("--horizon", args.horizon, "override experiment.horizon");
  app.add_option("--items", args.items, "comma-separated item filter");
  app.add_option("--output", args.output, "output directory");

  auto* sim = app.add_subcommand("simulate-data", "generate a synthetic transaction stream");
  std::string scenario = "item-a";
  int sim_items = 0, sim_days = 0;
  sim->add_option("--scenario", scenario, "item-a or shared-factor");
  sim->add_option("--n-items", sim_items, "number of items");
  sim->add_option("--days", sim_days, "number of days");

  std::string data_file;
  auto* fit = app.add_subcommand("fit", "filter models through the fit period");
  fit->add_option("--data", data_file, "transactions csv")->required();

  auto* fc = app.add_subcommand("forecast", "emit joint sample paths at one origin");
  int origin = -1;
  double rho = 1.0;
  fc->add_option("--data", data_file, "transactions csv")->required();
  fc->add_option("--origin", origin, "origin day index (default: end of fit period)");
  fc->add_option("--rho", rho, "random-effects discount for the count component");

  std::string samples_file;
  auto* ev = app.add_subcommand("evaluate", "score a samples file against realized data");
  ev->add_option("--samples", samples_file, "samples csv from forecast")->required();
  ev->add_option("--data", data_file, "transactions csv")->required();

  auto* run = app.add_subcommand("run-experiment", "full rolling-origin comparison");
  run->add_option("--data", data_file, "transactions csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(args, scenario, sim_items, sim_days);
    if (fit->parsed()) return cmd_fit(args, data_file);
    if (fc->parsed()) return cmd_forecast(args, data_file, origin, rho);
    if (ev->parsed()) return cmd_evaluate(args, samples_file, data_file);
    if (run->parsed()) return cmd_run(args, data_file);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}

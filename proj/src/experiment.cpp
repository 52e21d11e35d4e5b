#include "countcast/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <functional>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "countcast/dbcm.hpp"
#include "countcast/multiscale.hpp"
#include "json.hpp"

namespace countcast {

namespace {

std::uint64_t item_stream_id(const std::string& item_id) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : item_id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, end);
}

std::string format_rho(double rho) {
  std::string s;
  append_double(s, rho);
  return s;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  int workers = std::min(threads, n);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct FutureCovariates {
  std::map<std::pair<std::string, int>, std::pair<double, bool>> by_item_date;

  bool lookup(const std::string& item, int date, double& price, bool& promo) const {
    auto it = by_item_date.find({item, date});
    if (it == by_item_date.end()) return false;
    price = it->second.first;
    promo = it->second.second;
    return true;
  }
};

FutureCovariates load_future_covariates(const std::string& path) {
  FutureCovariates out;
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open future covariates file " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty future covariates file");
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string date_s, item, price_s, promo_s;
    if (!std::getline(ss, date_s, ',') || !std::getline(ss, item, ',') ||
        !std::getline(ss, price_s, ',') || !std::getline(ss, promo_s)) {
      throw std::runtime_error("future covariates line " + std::to_string(lineno) +
                               ": expected date,item_id,price,promo");
    }
    out.by_item_date[{item, parse_iso_date(date_s)}] = {std::stod(price_s), promo_s == "1"};
  }
  return out;
}

// Forward-fill price/promo from the origin day unless supplied.
std::vector<Covariates> make_future(const ItemSeries& item, int origin, int horizon,
                                    const FutureCovariates& supplied) {
  std::vector<Covariates> out;
  out.reserve(horizon);
  const DailyItemRecord& at_origin = item.days[origin];
  for (int j = 1; j <= horizon; ++j) {
    double price = std::exp(at_origin.log_price);
    bool promo = at_origin.promo;
    supplied.lookup(item.item_id, at_origin.date + j, price, promo);
    Covariates cov;
    cov.set("log_price", std::log(price));
    cov.set("promo", promo ? 1.0 : 0.0);
    out.push_back(std::move(cov));
  }
  return out;
}

struct ScoreState {
  int horizon;
  std::vector<double> levels;
  std::vector<double> mad_sum, mape_sum;
  std::vector<long> n, mape_n, mape_excluded;
  std::vector<std::vector<double>> cov_hits;  // [h][level]
  std::vector<std::vector<double>> pit;       // [h][origins]
  std::vector<std::vector<double>> no_excess;

  ScoreState(int k, const std::vector<double>& lv) : horizon(k), levels(lv) {
    mad_sum.assign(k, 0.0);
    mape_sum.assign(k, 0.0);
    n.assign(k, 0);
    mape_n.assign(k, 0);
    mape_excluded.assign(k, 0);
    cov_hits.assign(k, std::vector<double>(lv.size(), 0.0));
    pit.assign(k, {});
    no_excess.assign(k, {});
  }

  void add_record(const ForecastRecord& rec, RngStream& pit_rng) {
    int h = rec.horizon - 1;
    double med = point_forecast(rec.samples, PointRule::Median);
    mad_sum[h] += std::abs(static_cast<double>(rec.realized) - med);
    n[h] += 1;
    if (rec.realized > 0) {
      bool any_positive =
          std::any_of(rec.samples.begin(), rec.samples.end(), [](long v) { return v > 0; });
      // All-zero sample sets leave the (-1)-median undefined; score them as a
      // zero forecast rather than dropping the day.
      double f = any_positive ? point_forecast(rec.samples, PointRule::Neg1Median) : 0.0;
      mape_sum[h] += std::abs(static_cast<double>(rec.realized) - f) /
                     static_cast<double>(rec.realized);
      mape_n[h] += 1;
    } else {
      mape_excluded[h] += 1;
    }
    for (std::size_t li = 0; li < levels.size(); ++li) {
      auto [lo, hi] = hpd_interval(rec.samples, levels[li]);
      if (rec.realized >= lo && rec.realized <= hi) cov_hits[h][li] += 1.0;
    }
    pit[h].push_back(randomized_pit(rec, pit_rng));
  }

  void finish(VariantResult& out) const {
    out.mad.assign(horizon, 0.0);
    out.mape.assign(horizon, 0.0);
    out.mape_excluded.assign(mape_excluded.begin(), mape_excluded.end());
    out.coverage.assign(horizon, std::vector<double>(levels.size(), 0.0));
    for (int h = 0; h < horizon; ++h) {
      if (n[h] > 0) out.mad[h] = mad_sum[h] / static_cast<double>(n[h]);
      if (mape_n[h] > 0) out.mape[h] = mape_sum[h] / static_cast<double>(mape_n[h]);
      for (std::size_t li = 0; li < levels.size(); ++li) {
        if (n[h] > 0) out.coverage[h][li] = cov_hits[h][li] / static_cast<double>(n[h]);
      }
    }
    out.pit = pit;
    out.no_excess = no_excess;
  }
};

enum class Variant { Benchmark, Independent, Multiscale };

const char* variant_label(Variant v) {
  switch (v) {
    case Variant::Benchmark: return "dcmm";
    case Variant::Independent: return "dbcm_indep";
    case Variant::Multiscale: return "dbcm_ms";
  }
  return "?";
}

struct AggregatePass {
  std::vector<double> factor_mean;          // indexed by day
  std::map<int, FactorPaths> factor_paths;  // by origin day
};

AggregatePass run_aggregate_pass(const ExperimentConfig& cfg, const IngestResult& data,
                                 int first_origin, int last_origin, RngStream rng) {
  AggregatePass pass;
  const auto& agg = data.aggregate;
  const int n_days = static_cast<int>(agg.total_transactions.size());
  pass.factor_mean.assign(n_days, 0.0);
  AggregateModel model = build_aggregate(agg, cfg);
  for (int t = cfg.training_days; t <= last_origin; ++t) {
    pass.factor_mean[t] = model.next_day_factor_mean(agg.avg_price[t]);
    model.update(agg.total_transactions[t], agg.avg_price[t]);
    if (t >= first_origin) {
      std::vector<double> future_price(cfg.horizon, agg.avg_price[t]);
      RngStream origin_rng = rng.substream(static_cast<std::uint64_t>(t));
      pass.factor_paths.emplace(t, model.simulate_factor_paths(cfg.horizon, future_price,
                                                               cfg.paths, origin_rng));
    }
  }
  return pass;
}

VariantResult run_variant(const ExperimentConfig& cfg, const ItemSeries& item, Variant variant,
                          double rho, const AggregateSeries* aggregate,
                          const AggregatePass* agg_pass, const FutureCovariates& supplied,
                          int first_origin, int last_origin,
                          std::vector<ForecastSampleRow>* sample_rows) {
  VariantResult result;
  result.item = item.item_id;
  result.model = variant_label(variant);
  result.rho = rho;

  const bool is_benchmark = variant == Variant::Benchmark;
  const bool with_factor = variant == Variant::Multiscale;
  const DcmmTarget target = is_benchmark ? DcmmTarget::Sales : DcmmTarget::Transactions;

  DcmmModel dcmm = build_dcmm(item, cfg, target, rho, with_factor, aggregate);
  std::optional<CascadeModel> cascade;
  if (!is_benchmark) cascade = build_cascade(item, cfg);

  RngStream item_rng(cfg.seed, item_stream_id(item.item_id));
  RngStream filter_rng = item_rng.substream(1 + static_cast<std::uint64_t>(variant))
                             .substream(std::bit_cast<std::uint64_t>(rho));
  RngStream forecast_rng = filter_rng.substream(1);
  RngStream pit_rng = filter_rng.substream(2);

  ScoreState scores(cfg.horizon, cfg.coverage_levels);
  double log_score_sum = 0.0;
  long log_score_n = 0;

  for (int t = cfg.training_days; t <= last_origin; ++t) {
    const DailyItemRecord& day = item.days[t];
    Covariates cov = day_covariates(day);
    if (with_factor) cov.set("factor", agg_pass->factor_mean[t]);

    long observed = is_benchmark ? day.decomposition.y : day.decomposition.b;
    FilterDiagnostics diag = dcmm.filter_step(observed, cov, filter_rng);
    log_score_sum += diag.log_score;
    log_score_n += 1;
    if (cascade) cascade->filter_step(day.decomposition, cov);

    if (t < first_origin) continue;

    std::vector<Covariates> future = make_future(item, t, cfg.horizon, supplied);
    FactorBinding binding;
    const FactorBinding* binding_ptr = nullptr;
    if (with_factor) {
      binding.paths = &agg_pass->factor_paths.at(t);
      binding_ptr = &binding;
    }
    RngStream origin_rng = forecast_rng.substream(static_cast<std::uint64_t>(t));
    std::vector<TransactionPath> tp =
        dcmm.forecast_transaction_paths(cfg.horizon, future, cfg.paths, origin_rng, binding_ptr);

    std::vector<SalesPath> sp;
    if (cascade) {
      RngStream cascade_rng = origin_rng.substream(0xca5);
      sp = cascade->forecast_sales_paths(tp, future, cascade_rng, nullptr);
    }

    ForecastRecord rec;
    rec.origin = t;
    rec.samples.resize(cfg.paths);
    for (int j = 0; j < cfg.horizon; ++j) {
      rec.horizon = j + 1;
      for (int p = 0; p < cfg.paths; ++p) {
        rec.samples[p] = cascade ? sp[p].y[j] : tp[p].b[j];
      }
      bool realized_known = t + j + 1 < static_cast<int>(item.days.size());
      if (realized_known) {
        rec.realized = item.days[t + j + 1].decomposition.y;
        scores.add_record(rec, pit_rng);
      }
      if (cascade && realized_known) {
        double frac = 0.0;
        for (int p = 0; p < cfg.paths; ++p) frac += sp[p].no_excess[j] ? 1.0 : 0.0;
        scores.no_excess[j].push_back(frac / static_cast<double>(cfg.paths));
      }
      if (sample_rows != nullptr) {
        for (int p = 0; p < cfg.paths; ++p) {
          sample_rows->push_back({item.item_id, result.model, t, j + 1, p, rec.samples[p],
                                  cascade ? static_cast<bool>(sp[p].no_excess[j]) : true});
        }
      }
    }
  }

  scores.finish(result);
  result.mean_log_score = log_score_n > 0 ? log_score_sum / log_score_n : 0.0;
  result.ok = true;
  return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const IngestResult& data) {
  cfg.validate();
  solver_options() = {cfg.solver_max_iter, cfg.solver_tol};

  const int n_days = static_cast<int>(data.aggregate.total_transactions.size());
  const int first_origin = cfg.training_days + cfg.fit_days;
  const int last_origin = first_origin + cfg.forecast_days - 1;
  if (cfg.forecast_days < 1) throw std::invalid_argument("experiment: no forecast days");
  if (last_origin + cfg.horizon >= n_days) {
    throw std::invalid_argument(
        "experiment: data too short for training + fit + forecast + horizon");
  }

  std::vector<const ItemSeries*> items;
  for (const auto& item : data.items) {
    if (cfg.items.empty() ||
        std::find(cfg.items.begin(), cfg.items.end(), item.item_id) != cfg.items.end()) {
      items.push_back(&item);
    }
  }
  if (items.empty()) throw std::invalid_argument("experiment: no items selected");

  FutureCovariates supplied = load_future_covariates(cfg.future_covariates_file);

  AggregatePass agg_pass;
  if (cfg.run_multiscale) {
    RngStream agg_rng(cfg.seed, 0xA66);
    agg_pass = run_aggregate_pass(cfg, data, first_origin, last_origin, agg_rng);
  }

  std::vector<Variant> variants;
  if (cfg.run_benchmark) variants.push_back(Variant::Benchmark);
  if (cfg.run_independent) variants.push_back(Variant::Independent);
  if (cfg.run_multiscale) variants.push_back(Variant::Multiscale);
  if (variants.empty()) throw std::invalid_argument("experiment: no model variants enabled");

  struct Task {
    const ItemSeries* item;
    Variant variant;
    double rho;
  };
  std::vector<Task> tasks;
  for (const ItemSeries* item : items) {
    for (Variant v : variants) {
      for (double rho : cfg.rho_grid) tasks.push_back({item, v, rho});
    }
  }

  ExperimentResult out;
  out.first_origin = first_origin;
  out.n_origins = cfg.forecast_days;
  out.variants.resize(tasks.size());

  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  parallel_for(static_cast<int>(tasks.size()), threads, [&](int i) {
    const Task& task = tasks[i];
    try {
      out.variants[i] = run_variant(cfg, *task.item, task.variant, task.rho,
                                    &data.aggregate, &agg_pass, supplied, first_origin,
                                    last_origin, nullptr);
    } catch (const std::exception& err) {
      VariantResult failed;
      failed.item = task.item->item_id;
      failed.model = variant_label(task.variant);
      failed.rho = task.rho;
      failed.ok = false;
      failed.error = err.what();
      out.variants[i] = std::move(failed);
    }
  });
  return out;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

}  // namespace

ExperimentResult run_experiment_to_dir(const ExperimentConfig& cfg, const IngestResult& data,
                                       const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  ExperimentResult result = run_experiment(cfg, data);

  // metrics.csv: long format over horizons.
  std::string metrics = "item,model,rho,horizon,metric,value\n";
  std::string coverage = "item,model,rho,horizon,level,coverage\n";
  std::string pit = "item,model,rho,horizon,pit\n";
  std::string no_excess = "item,model,rho,origin,horizon,prob_no_excess\n";
  for (const auto& v : result.variants) {
    if (!v.ok) continue;
    std::string prefix = v.item + "," + v.model + "," + format_rho(v.rho) + ",";
    for (int h = 0; h < static_cast<int>(v.mad.size()); ++h) {
      std::string hs = std::to_string(h + 1);
      metrics += prefix + hs + ",mad,";
      append_double(metrics, v.mad[h]);
      metrics += "\n" + prefix + hs + ",mape,";
      append_double(metrics, v.mape[h]);
      metrics += "\n";
      for (std::size_t li = 0; li < cfg.coverage_levels.size(); ++li) {
        coverage += prefix + hs + ",";
        append_double(coverage, cfg.coverage_levels[li]);
        coverage += ",";
        append_double(coverage, v.coverage[h][li]);
        coverage += "\n";
      }
      for (double p : v.pit[h]) {
        pit += prefix + hs + ",";
        append_double(pit, p);
        pit += "\n";
      }
      for (std::size_t oi = 0; oi < v.no_excess[h].size(); ++oi) {
        no_excess += prefix + std::to_string(result.first_origin + static_cast<int>(oi)) + "," +
                     hs + ",";
        append_double(no_excess, v.no_excess[h][oi]);
        no_excess += "\n";
      }
    }
  }
  write_text(out_dir + "/metrics.csv", metrics);
  write_text(out_dir + "/coverage.csv", coverage);
  write_text(out_dir + "/pit.csv", pit);
  write_text(out_dir + "/no_excess.csv", no_excess);

  // Best-over-rho per (item, model, horizon, metric).
  std::map<std::tuple<std::string, std::string, int, std::string>, double> best;
  for (const auto& v : result.variants) {
    if (!v.ok) continue;
    for (int h = 0; h < static_cast<int>(v.mad.size()); ++h) {
      auto consider = [&](const std::string& metric, double value) {
        auto key = std::make_tuple(v.item, v.model, h + 1, metric);
        auto it = best.find(key);
        if (it == best.end() || value < it->second) best[key] = value;
      };
      consider("mad", v.mad[h]);
      consider("mape", v.mape[h]);
    }
  }
  std::string best_csv = "item,model,horizon,metric,value\n";
  for (const auto& [key, value] : best) {
    best_csv += std::get<0>(key) + "," + std::get<1>(key) + "," +
                std::to_string(std::get<2>(key)) + "," + std::get<3>(key) + ",";
    append_double(best_csv, value);
    best_csv += "\n";
  }
  write_text(out_dir + "/metrics_best.csv", best_csv);

  // Manifest: run header plus one line per combination.
  std::string manifest;
  {
    nlohmann::json header;
    header["type"] = "run";
    header["seed"] = cfg.seed;
    header["n_items"] = data.items.size();
    header["first_origin"] = result.first_origin;
    header["n_origins"] = result.n_origins;
    header["config"] = describe_config(cfg);
    manifest += header.dump() + "\n";
  }
  for (const auto& v : result.variants) {
    nlohmann::json line;
    line["type"] = "variant";
    line["item"] = v.item;
    line["model"] = v.model;
    line["rho"] = v.rho;
    line["status"] = v.ok ? "ok" : "failed";
    if (!v.ok) line["error"] = v.error;
    if (v.ok) line["mean_log_score"] = v.mean_log_score;
    manifest += line.dump() + "\n";
  }
  write_text(out_dir + "/manifest.jsonl", manifest);

  if (cfg.run_multiscale) {
    RngStream agg_rng(cfg.seed, 0xA66);
    AggregatePass pass = run_aggregate_pass(cfg, data, result.first_origin,
                                            result.first_origin, agg_rng);
    write_factor_paths(pass.factor_paths.at(result.first_origin),
                       out_dir + "/factor_paths.csv");
  }

  if (cfg.emit_samples) {
    FutureCovariates supplied = load_future_covariates(cfg.future_covariates_file);
    AggregatePass pass;
    if (cfg.run_multiscale) {
      RngStream agg_rng(cfg.seed, 0xA66);
      pass = run_aggregate_pass(cfg, data, result.first_origin,
                                result.first_origin + result.n_origins - 1, agg_rng);
    }
    std::vector<ForecastSampleRow> rows;
    for (const auto& item : data.items) {
      if (!cfg.items.empty() &&
          std::find(cfg.items.begin(), cfg.items.end(), item.item_id) == cfg.items.end()) {
        continue;
      }
      Variant v = cfg.run_multiscale ? Variant::Multiscale
                 : cfg.run_independent ? Variant::Independent
                                       : Variant::Benchmark;
      run_variant(cfg, item, v, cfg.rho_grid.front(), &data.aggregate, &pass, supplied,
                  result.first_origin, result.first_origin + result.n_origins - 1, &rows);
    }
    write_sample_rows(out_dir + "/samples.csv", rows);
  }

  return result;
}

std::vector<ForecastSampleRow> forecast_at_origin(const ExperimentConfig& cfg,
                                                  const IngestResult& data, int origin_index,
                                                  double rho) {
  cfg.validate();
  solver_options() = {cfg.solver_max_iter, cfg.solver_tol};
  const int n_days = static_cast<int>(data.aggregate.total_transactions.size());
  if (origin_index < cfg.training_days || origin_index >= n_days) {
    throw std::invalid_argument("forecast origin outside the filtered range");
  }
  FutureCovariates supplied = load_future_covariates(cfg.future_covariates_file);
  AggregatePass pass;
  if (cfg.run_multiscale) {
    RngStream agg_rng(cfg.seed, 0xA66);
    pass = run_aggregate_pass(cfg, data, origin_index, origin_index, agg_rng);
  }
  Variant variant = cfg.run_multiscale ? Variant::Multiscale
                   : cfg.run_independent ? Variant::Independent
                                         : Variant::Benchmark;
  std::vector<ForecastSampleRow> rows;
  for (const auto& item : data.items) {
    if (!cfg.items.empty() &&
        std::find(cfg.items.begin(), cfg.items.end(), item.item_id) == cfg.items.end()) {
      continue;
    }
    // Forecast-only runs may not have realized data past the origin; scoring
    // is skipped, so a shortened horizon guard is enough.
    run_variant(cfg, item, variant, rho, &data.aggregate, &pass, supplied, origin_index,
                origin_index, &rows);
  }
  return rows;
}

void write_sample_rows(const std::string& path, const std::vector<ForecastSampleRow>& rows) {
  std::string text = "item,model,origin,horizon,path,y,no_excess\n";
  for (const auto& r : rows) {
    text += r.item + "," + r.model + "," + std::to_string(r.origin) + "," +
            std::to_string(r.horizon) + "," + std::to_string(r.path) + "," +
            std::to_string(r.y) + "," + (r.no_excess ? "1" : "0") + "\n";
  }
  write_text(path, text);
}

std::vector<ForecastRecord> records_from_samples(const std::vector<ForecastSampleRow>& rows,
                                                 const IngestResult& data,
                                                 const std::string& item,
                                                 const std::string& model) {
  const ItemSeries* series = nullptr;
  for (const auto& s : data.items) {
    if (s.item_id == item) series = &s;
  }
  if (series == nullptr) throw std::invalid_argument("unknown item " + item);
  std::map<std::pair<int, int>, ForecastRecord> grouped;
  for (const auto& r : rows) {
    if (r.item != item || r.model != model) continue;
    auto& rec = grouped[{r.origin, r.horizon}];
    rec.origin = r.origin;
    rec.horizon = r.horizon;
    rec.samples.push_back(r.y);
  }
  std::vector<ForecastRecord> out;
  for (auto& [key, rec] : grouped) {
    int day = key.first + key.second;
    if (day >= static_cast<int>(series->days.size())) continue;  // unrealized
    rec.realized = series->days[day].decomposition.y;
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace countcast

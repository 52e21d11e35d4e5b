#pragma once

#include <optional>
#include <string>
#include <vector>

#include "countcast/config.hpp"
#include "countcast/evaluation.hpp"
#include "countcast/ingest.hpp"
#include "countcast/model_builder.hpp"

namespace countcast {

// Scored rolling-origin results for one (item, model, rho) combination.
struct VariantResult {
  std::string item;
  std::string model;  // dcmm | dbcm_indep | dbcm_ms
  double rho = 1.0;
  bool ok = false;
  std::string error;

  std::vector<double> mad;                          // per horizon
  std::vector<double> mape;                         // per horizon
  std::vector<long> mape_excluded;                  // zero-actual days
  std::vector<std::vector<double>> coverage;        // [horizon][level]
  std::vector<std::vector<double>> pit;             // [horizon][origin]
  std::vector<std::vector<double>> no_excess;       // [horizon][origin]; DBCM only
  double mean_log_score = 0.0;                      // 1-step filter diagnostic
};

struct ExperimentResult {
  std::vector<VariantResult> variants;
  int first_origin = 0;
  int n_origins = 0;
};

// Filter through the fit period, forecast at every origin of the forecast
// period, and score. Items run in parallel; all randomness derives from
// (config seed, item id), so results are independent of scheduling and of
// which other items are selected.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const IngestResult& data);

// As above, plus report files under out_dir: metrics.csv, metrics_best.csv,
// coverage.csv, pit.csv, no_excess.csv, manifest.jsonl, and (multi-scale)
// factor_paths.csv; samples.csv when emit_samples is set.
ExperimentResult run_experiment_to_dir(const ExperimentConfig& cfg, const IngestResult& data,
                                       const std::string& out_dir);

// Single-origin forecast: joint sample paths for every selected item at one
// origin day, in long format rows.
struct ForecastSampleRow {
  std::string item;
  std::string model;
  int origin = 0;
  int horizon = 0;
  int path = 0;
  long y = 0;
  bool no_excess = true;
};

std::vector<ForecastSampleRow> forecast_at_origin(const ExperimentConfig& cfg,
                                                  const IngestResult& data, int origin_index,
                                                  double rho);

void write_sample_rows(const std::string& path, const std::vector<ForecastSampleRow>& rows);

// Rebuild records from sample rows plus realized data, then score; the
// `evaluate` CLI path.
std::vector<ForecastRecord> records_from_samples(const std::vector<ForecastSampleRow>& rows,
                                                 const IngestResult& data,
                                                 const std::string& item,
                                                 const std::string& model);

}  // namespace countcast

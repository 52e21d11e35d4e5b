#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "countcast/dbcm.hpp"

namespace countcast {

// Proleptic Gregorian day count (days since 1970-01-01).
int days_from_civil(int year, int month, int day);
void civil_from_days(int serial, int& year, int& month, int& day);
std::string iso_date(int serial);
int parse_iso_date(const std::string& text);  // throws on malformed dates

// One purchase event: `units` copies of the item in one basket.
struct TransactionRow {
  int date = 0;  // serial day
  std::string item_id;
  double price = 0.0;
  bool promo = false;
  long units = 0;
};

struct DailyItemRecord {
  int date = 0;
  DayDecomposition decomposition;
  double log_price = 0.0;
  bool promo = false;
};

// Day-indexed series over the common calendar range (zero-transaction days
// included; price/promo carried forward, backfilled before first sale).
struct ItemSeries {
  std::string item_id;
  int start_date = 0;
  std::vector<DailyItemRecord> days;
};

struct AggregateSeries {
  int start_date = 0;
  std::vector<long> total_transactions;
  std::vector<double> avg_price;  // across items, of the filled daily prices
};

struct IngestResult {
  std::vector<ItemSeries> items;  // sorted by item id
  AggregateSeries aggregate;
};

// CSV with header `date,item_id,price,promo,units`, ISO-8601 dates,
// promo in {0,1}. Malformed rows raise std::runtime_error with the line
// number; an empty file raises too.
IngestResult ingest(std::istream& in, int cascade_depth);
IngestResult ingest_file(const std::string& path, int cascade_depth);

void write_transactions_csv(std::ostream& out, const std::vector<TransactionRow>& rows);

}  // namespace countcast

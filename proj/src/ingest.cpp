#include "countcast/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace countcast {

int days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

void civil_from_days(int serial, int& y, int& m, int& d) {
  int z = serial + 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int yr = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = yr + (m <= 2);
}

std::string iso_date(int serial) {
  int y, m, d;
  civil_from_days(serial, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

int parse_iso_date(const std::string& text) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      std::sscanf(text.c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3 || m < 1 || m > 12 ||
      d < 1 || d > 31) {
    throw std::runtime_error("bad date '" + text + "'");
  }
  return days_from_civil(y, m, d);
}

namespace {

struct RawDay {
  std::vector<long> basket_sizes;
  double price_units = 0.0;  // sum price * units, for the unit-weighted mean
  long units = 0;
  bool promo = false;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

IngestResult ingest(std::istream& in, int cascade_depth) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ingest: empty input");
  {
    auto header = split_csv_line(line);
    const std::vector<std::string> want = {"date", "item_id", "price", "promo", "units"};
    if (std::vector<std::string>(header.begin(), header.end()) != want) {
      throw std::runtime_error("ingest: expected header date,item_id,price,promo,units");
    }
  }

  std::map<std::string, std::map<int, RawDay>> per_item;
  int min_date = 0, max_date = 0;
  bool any = false;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 5) {
      throw std::runtime_error("ingest: line " + std::to_string(lineno) + ": expected 5 fields");
    }
    try {
      int date = parse_iso_date(fields[0]);
      const std::string& item = fields[1];
      if (item.empty()) throw std::runtime_error("empty item id");
      double price = std::stod(fields[2]);
      if (!(price > 0.0)) throw std::runtime_error("price must be positive");
      bool promo;
      if (fields[3] == "0") promo = false;
      else if (fields[3] == "1") promo = true;
      else throw std::runtime_error("promo must be 0 or 1");
      long units = std::stol(fields[4]);
      if (units < 1) throw std::runtime_error("units must be >= 1");

      RawDay& day = per_item[item][date];
      day.basket_sizes.push_back(units);
      day.price_units += price * static_cast<double>(units);
      day.units += units;
      day.promo = day.promo || promo;
      if (!any) {
        min_date = max_date = date;
        any = true;
      } else {
        min_date = std::min(min_date, date);
        max_date = std::max(max_date, date);
      }
    } catch (const std::exception& err) {
      throw std::runtime_error("ingest: line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  if (!any) throw std::runtime_error("ingest: no transaction rows");

  const int n_days = max_date - min_date + 1;
  IngestResult out;
  out.aggregate.start_date = min_date;
  out.aggregate.total_transactions.assign(n_days, 0);
  out.aggregate.avg_price.assign(n_days, 0.0);

  for (auto& [item_id, raw_days] : per_item) {
    ItemSeries series;
    series.item_id = item_id;
    series.start_date = min_date;
    series.days.reserve(n_days);

    // Backfill leading empty days from the first observed price/promo.
    const RawDay& first = raw_days.begin()->second;
    double price = first.price_units / static_cast<double>(first.units);
    bool promo = first.promo;

    for (int t = 0; t < n_days; ++t) {
      int date = min_date + t;
      auto it = raw_days.find(date);
      DailyItemRecord rec;
      rec.date = date;
      if (it != raw_days.end()) {
        price = it->second.price_units / static_cast<double>(it->second.units);
        promo = it->second.promo;
        rec.decomposition = decompose_day(it->second.basket_sizes, cascade_depth);
      } else {
        rec.decomposition = decompose_day({}, cascade_depth);
      }
      rec.log_price = std::log(price);
      rec.promo = promo;
      series.days.push_back(std::move(rec));

      out.aggregate.total_transactions[t] += series.days.back().decomposition.b;
      out.aggregate.avg_price[t] += price;
    }
    out.items.push_back(std::move(series));
  }
  const double n_items = static_cast<double>(out.items.size());
  for (double& p : out.aggregate.avg_price) p /= n_items;
  return out;
}

IngestResult ingest_file(const std::string& path, int cascade_depth) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return ingest(in, cascade_depth);
}

void write_transactions_csv(std::ostream& out, const std::vector<TransactionRow>& rows) {
  out << "date,item_id,price,promo,units\n";
  char buf[32];
  for (const auto& row : rows) {
    out << iso_date(row.date) << ',' << row.item_id << ',';
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), row.price);
    out.write(buf, end - buf);
    out << ',' << (row.promo ? 1 : 0) << ',' << row.units << '\n';
  }
}

}  // namespace countcast

#include "chainsim/demand.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

namespace chainsim {

uint64_t derive_seed(uint64_t master, std::string_view tag) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a over the tag
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ull;
  }
  uint64_t z = master + 0x9e3779b97f4a7c15ull + h;  // splitmix64 finalizer
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d649bb133111ebull;
  return z ^ (z >> 31);
}

ArtificialDemand gen_artificial_demand(const ArtificialDemandParams& p, uint64_t seed) {
  require(p.products > 0 && p.retailers > 0, "artificial demand needs products and retailers");
  require(p.horizon > 0 && p.predictdays > 0, "artificial demand needs horizon and predictdays");
  require(p.base_level > 0.0 && p.period > 0.0, "base level and period must be positive");

  ArtificialDemand out;
  out.series.t_ext = p.horizon + p.predictdays;
  out.series.products = p.products;
  out.series.retailers = p.retailers;
  out.series.sim_horizon = p.horizon;
  out.series.values = Tensor3(out.series.t_ext, p.products, p.retailers);
  out.offset.resize(p.products);
  out.fluctuation.resize(p.products, p.retailers);

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> off_dist(0.0, p.period);
  std::uniform_real_distribution<double> fluc_dist(0.0, 1.0);
  for (int k = 0; k < p.products; ++k) out.offset[k] = off_dist(gen);
  for (int k = 0; k < p.products; ++k)
    for (int i = 0; i < p.retailers; ++i) out.fluctuation(k, i) = fluc_dist(gen);

  const double two_pi = 2.0 * std::numbers::pi;
  for (int t = 0; t < out.series.t_ext; ++t) {
    for (int k = 0; k < p.products; ++k) {
      const double c = std::cos(two_pi * (t + out.offset[k]) / p.period);
      for (int i = 0; i < p.retailers; ++i) {
        out.series.values.at(t, k, i) = (1.0 + c * out.fluctuation(k, i)) * p.base_level;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  const char delim = line.find(',') != std::string::npos ? ',' : '\t';
  std::vector<std::string> fields;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, delim)) {
    // trim surrounding whitespace
    size_t a = cur.find_first_not_of(" \t\r");
    size_t b = cur.find_last_not_of(" \t\r");
    fields.push_back(a == std::string::npos ? std::string() : cur.substr(a, b - a + 1));
  }
  return fields;
}

bool parse_i64(const std::string& s, int64_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

IngestResult ingest_orders(std::istream& in) {
  IngestResult res;
  std::string line;
  int lineno = 0;
  std::array<int, 4> col = {0, 1, 2, 3};  // customer, product, day, dow
  bool header_checked = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    auto fields = split_fields(line);

    if (!header_checked) {
      header_checked = true;
      int64_t probe;
      if (!fields.empty() && !parse_i64(fields[0], probe)) {
        // header row: locate the four required columns by name
        const std::array<std::string, 4> names = {"customer_id", "product_id",
                                                  "days_since_first_order", "day_of_week"};
        for (int c = 0; c < 4; ++c) {
          auto it = std::find(fields.begin(), fields.end(), names[c]);
          if (it == fields.end()) {
            throw std::runtime_error("ingest: missing required column '" + names[c] + "'");
          }
          col[c] = static_cast<int>(it - fields.begin());
        }
        continue;
      }
    }

    const int needed = 1 + *std::max_element(col.begin(), col.end());
    if (static_cast<int>(fields.size()) < needed) {
      res.row_errors.push_back("line " + std::to_string(lineno) + ": expected at least " +
                               std::to_string(needed) + " fields, got " +
                               std::to_string(fields.size()));
      continue;
    }
    int64_t customer, product, day, dow;
    if (!parse_i64(fields[col[0]], customer) || !parse_i64(fields[col[1]], product) ||
        !parse_i64(fields[col[2]], day) || !parse_i64(fields[col[3]], dow)) {
      res.row_errors.push_back("line " + std::to_string(lineno) + ": non-integer field");
      continue;
    }
    if (day < 0) {
      res.row_errors.push_back("line " + std::to_string(lineno) + ": negative days_since_first_order");
      continue;
    }
    if (dow < 0 || dow > 6) {
      res.row_errors.push_back("line " + std::to_string(lineno) + ": day_of_week out of range");
      continue;
    }
    res.rows.push_back({customer, product, static_cast<int>(day), static_cast<int>(dow)});
  }
  return res;
}

IngestResult ingest_orders_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return ingest_orders(f);
}

// ---------------------------------------------------------------------------
// Preprocessing

namespace {

struct CustomerOrders {
  int first_dow = 0;
  int min_day = 0;
  int span = 0;
  std::vector<std::pair<int, int64_t>> orders;  // (relative day, product)
};

[[noreturn]] void stage_error(const std::string& stage, const std::string& msg) {
  throw std::runtime_error("preprocess[" + stage + "]: " + msg);
}

}  // namespace

PreprocessResult preprocess_orders(const std::vector<OrderRecord>& rows,
                                   const PreprocessParams& p, uint64_t seed) {
  PreprocessResult out;
  auto& counts = out.stage_counts;
  counts["raw_rows"] = static_cast<int64_t>(rows.size());

  // Group rows per customer; anchor each at their earliest order.
  std::unordered_map<int64_t, CustomerOrders> by_customer;
  for (const auto& r : rows) {
    auto& c = by_customer[r.customer];
    c.min_day = c.orders.empty() ? r.day : std::min(c.min_day, r.day);
    c.orders.emplace_back(r.day, r.product);
  }
  for (auto& [id, c] : by_customer) {
    int max_day = c.min_day;
    for (const auto& [day, prod] : c.orders) max_day = std::max(max_day, day);
    c.span = max_day - c.min_day;
  }
  // The first-order weekday anchors the customer in the unified calendar.
  for (const auto& r : rows) {
    auto& c = by_customer[r.customer];
    if (r.day == c.min_day) c.first_dow = r.dow;
  }
  counts["customers_raw"] = static_cast<int64_t>(by_customer.size());

  // (a) span filter; the first-order window then holds by construction since
  // aligned first orders land on days 0..6 <= first_order_window.
  std::vector<int64_t> kept_customers;
  for (auto& [id, c] : by_customer) {
    if (c.span > p.min_span) kept_customers.push_back(id);
  }
  std::sort(kept_customers.begin(), kept_customers.end());
  counts["customers_kept"] = static_cast<int64_t>(kept_customers.size());
  if (kept_customers.size() < static_cast<size_t>(p.retailer_count)) {
    stage_error("span-filter", "only " + std::to_string(kept_customers.size()) +
                                   " customers survive, need >= " + std::to_string(p.retailer_count));
  }

  // (b) unified calendar: day = first-order weekday + days since first order.
  int calendar_days = 0;
  for (int64_t id : kept_customers) {
    const auto& c = by_customer[id];
    calendar_days = std::max(calendar_days, c.first_dow + c.span + 1);
  }
  counts["calendar_days"] = calendar_days;

  // (c) seeded shuffle, contiguous chunks -> retailer groups.
  std::vector<int64_t> shuffled = kept_customers;
  {
    std::mt19937_64 gen(derive_seed(seed, "retailer-groups"));
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
  }
  const int R = p.retailer_count;
  std::vector<std::vector<int64_t>> groups(R);
  {
    const size_t n = shuffled.size();
    const size_t base = n / R;
    const size_t extra = n % R;
    size_t pos = 0;
    for (int g = 0; g < R; ++g) {
      const size_t len = base + (static_cast<size_t>(g) < extra ? 1 : 0);
      groups[g].assign(shuffled.begin() + pos, shuffled.begin() + pos + len);
      pos += len;
    }
  }
  std::unordered_map<int64_t, int> customer_group;
  for (int g = 0; g < R; ++g)
    for (int64_t id : groups[g]) customer_group[id] = g;

  // (d) order-count band over kept customers' rows.
  std::unordered_map<int64_t, int64_t> product_orders;
  for (int64_t id : kept_customers) {
    for (const auto& [day, prod] : by_customer[id].orders) ++product_orders[prod];
  }
  counts["products_raw"] = static_cast<int64_t>(product_orders.size());
  std::vector<int64_t> band_products;
  for (const auto& [prod, n] : product_orders) {
    if (n >= p.order_count_min && n <= p.order_count_max) band_products.push_back(prod);
  }
  std::sort(band_products.begin(), band_products.end());
  counts["products_in_band"] = static_cast<int64_t>(band_products.size());
  if (band_products.size() < static_cast<size_t>(p.product_count)) {
    stage_error("order-count-band", "only " + std::to_string(band_products.size()) +
                                        " products in band, need >= " +
                                        std::to_string(p.product_count));
  }

  // Daily totals per band product on the unified calendar.
  std::unordered_map<int64_t, int> band_index;
  for (size_t j = 0; j < band_products.size(); ++j) band_index[band_products[j]] = static_cast<int>(j);
  std::vector<std::vector<double>> daily_total(band_products.size(),
                                               std::vector<double>(calendar_days, 0.0));
  for (int64_t id : kept_customers) {
    const auto& c = by_customer[id];
    for (const auto& [day, prod] : c.orders) {
      auto it = band_index.find(prod);
      if (it == band_index.end()) continue;
      const int u = c.first_dow + (day - c.min_day);
      daily_total[it->second][u] += 1.0;
    }
  }

  // (e) seasonality: max over 70-day windows of stddev/mean of daily totals.
  if (calendar_days < p.season_window) {
    stage_error("seasonality", "calendar shorter than the seasonality window");
  }
  std::vector<std::pair<double, int64_t>> scored;  // (-score, id) for stable ordering
  for (size_t j = 0; j < band_products.size(); ++j) {
    const auto& series = daily_total[j];
    double best = 0.0;
    for (int w = 0; w + p.season_window <= calendar_days; ++w) {
      double mean = 0.0;
      for (int d = 0; d < p.season_window; ++d) mean += series[w + d];
      mean /= p.season_window;
      if (mean <= 0.0) continue;
      double var = 0.0;
      for (int d = 0; d < p.season_window; ++d) {
        const double dd = series[w + d] - mean;
        var += dd * dd;
      }
      var /= p.season_window;
      best = std::max(best, std::sqrt(var) / mean);
    }
    scored.emplace_back(-best, band_products[j]);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<int64_t> season_products;
  for (int j = 0; j < p.product_count; ++j) season_products.push_back(scored[j].second);
  std::sort(season_products.begin(), season_products.end());
  counts["products_kept"] = static_cast<int64_t>(season_products.size());

  // (f) drop the first cut_head days (week-one alignment bias).
  const int span_after_cut = calendar_days - p.cut_head;
  counts["calendar_days_after_cut"] = span_after_cut;
  if (span_after_cut < p.horizon + p.predictdays) {
    stage_error("horizon", "calendar after head cut (" + std::to_string(span_after_cut) +
                               " days) shorter than horizon + predictdays (" +
                               std::to_string(p.horizon + p.predictdays) + ")");
  }

  // Assemble the full [t][product][group] tensor, then (g) scale per product.
  std::unordered_map<int64_t, int> season_index;
  for (size_t j = 0; j < season_products.size(); ++j)
    season_index[season_products[j]] = static_cast<int>(j);
  Tensor3 full(span_after_cut, static_cast<int>(season_products.size()), R);
  for (int64_t id : kept_customers) {
    const auto& c = by_customer[id];
    const int g = customer_group[id];
    for (const auto& [day, prod] : c.orders) {
      auto it = season_index.find(prod);
      if (it == season_index.end()) continue;
      const int u = c.first_dow + (day - c.min_day) - p.cut_head;
      if (u < 0) continue;
      full.at(u, it->second, g) += 1.0;
    }
  }
  for (size_t j = 0; j < season_products.size(); ++j) {
    double total = 0.0;
    for (int t = 0; t < span_after_cut; ++t)
      for (int g = 0; g < R; ++g) total += full.at(t, static_cast<int>(j), g);
    if (total <= 0.0) {
      stage_error("scaling", "product " + std::to_string(season_products[j]) +
                                 " has zero demand after the head cut");
    }
    const double factor = p.per_product_total / total;
    for (int t = 0; t < span_after_cut; ++t)
      for (int g = 0; g < R; ++g) full.at(t, static_cast<int>(j), g) *= factor;
  }

  // (h) disjoint train/eval split of products and retailer groups.
  std::vector<int> prod_order(season_products.size());
  for (size_t j = 0; j < prod_order.size(); ++j) prod_order[j] = static_cast<int>(j);
  {
    std::mt19937_64 gen(derive_seed(seed, "product-split"));
    std::shuffle(prod_order.begin(), prod_order.end(), gen);
  }
  std::vector<int> group_order(R);
  for (int g = 0; g < R; ++g) group_order[g] = g;
  {
    std::mt19937_64 gen(derive_seed(seed, "retailer-split"));
    std::shuffle(group_order.begin(), group_order.end(), gen);
  }
  const int np_train = static_cast<int>(prod_order.size()) / 2;
  const int ng_train = R / 2;

  auto build_split = [&](bool train) {
    SplitData sd;
    const int p0 = train ? 0 : np_train;
    const int p1 = train ? np_train : static_cast<int>(prod_order.size());
    const int g0 = train ? 0 : ng_train;
    const int g1 = train ? ng_train : R;
    std::vector<int> prods(prod_order.begin() + p0, prod_order.begin() + p1);
    std::vector<int> grps(group_order.begin() + g0, group_order.begin() + g1);
    std::sort(prods.begin(), prods.end());
    std::sort(grps.begin(), grps.end());
    sd.demand.t_ext = span_after_cut;
    sd.demand.products = static_cast<int>(prods.size());
    sd.demand.retailers = static_cast<int>(grps.size());
    sd.demand.sim_horizon = p.horizon;
    sd.demand.values = Tensor3(span_after_cut, sd.demand.products, sd.demand.retailers);
    for (int t = 0; t < span_after_cut; ++t)
      for (size_t a = 0; a < prods.size(); ++a)
        for (size_t b = 0; b < grps.size(); ++b)
          sd.demand.values.at(t, static_cast<int>(a), static_cast<int>(b)) =
              full.at(t, prods[a], grps[b]);
    for (int j : prods) sd.product_ids.push_back(season_products[j]);
    for (int g : grps) sd.retailer_customers.push_back(groups[g]);
    return sd;
  };
  out.train = build_split(true);
  out.eval = build_split(false);
  out.scaled = std::move(full);
  out.scaled_product_ids = season_products;
  counts["train_products"] = out.train.demand.products;
  counts["train_retailers"] = out.train.demand.retailers;
  counts["eval_products"] = out.eval.demand.products;
  counts["eval_retailers"] = out.eval.demand.retailers;
  return out;
}

// ---------------------------------------------------------------------------
// Attributes

ScenarioAttributes sample_attributes(const DemandSeries& demand, const AttributeRanges& r,
                                     uint64_t seed) {
  require(demand.products > 0 && demand.retailers > 0, "demand series is empty");
  require(r.bs_floor > 0.0, "bs_floor must be positive");
  ScenarioAttributes out;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> price(r.price_min, r.price_max);
  std::uniform_real_distribution<double> stockcost(r.stockcost_min, r.stockcost_max);
  std::uniform_int_distribution<int> delay(r.delay_min, r.delay_max);
  std::uniform_real_distribution<double> trucksize(r.trucksize_min, r.trucksize_max);
  std::uniform_int_distribution<int> rdelay(r.retailer_delay_min, r.retailer_delay_max);

  out.products.resize(demand.products);
  for (auto& ps : out.products) {
    ps.price = price(gen);
    ps.stockcost = stockcost(gen);
    ps.delay = delay(gen);
  }
  out.retailers.resize(demand.retailers);
  for (auto& rs : out.retailers) {
    rs.trucksize = trucksize(gen);
    rs.delay = rdelay(gen);
  }
  for (int i = 0; i < demand.retailers; ++i) {
    auto& rs = out.retailers[i];
    rs.basestock = Eigen::ArrayXd::Zero(demand.products);
    for (int k = 0; k < demand.products; ++k) {
      double mean = 0.0;
      for (int t = 0; t < demand.t_ext; ++t) mean += demand.at(t, k, i);
      mean /= demand.t_ext;
      rs.basestock[k] = std::max(r.bs_floor, r.bs_mult * mean * (rs.delay + r.bs_slack));
    }
  }
  return out;
}

Tensor3 build_predictions(const DemandSeries& demand, int predictdays) {
  require(predictdays > 0, "predictdays must be positive");
  require(demand.t_ext >= demand.sim_horizon + predictdays,
          "demand series too short for the prediction window");
  Tensor3 pred(demand.sim_horizon, demand.products, predictdays);
  for (int t = 0; t < demand.sim_horizon; ++t) {
    for (int k = 0; k < demand.products; ++k) {
      for (int j = 0; j < predictdays; ++j) {
        pred.at(t, k, j) = seq_sum(demand.day_product(t + 1 + j, k));
      }
    }
  }
  return pred;
}

}  // namespace chainsim

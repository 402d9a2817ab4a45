#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chainsim/core_model.hpp"
#include "chainsim/tensor.hpp"

namespace chainsim {

/// Demand tensor plus the horizon split: days [0, sim_horizon) are simulated,
/// the tail up to t_ext feeds the prediction features. Invariant:
/// t_ext >= sim_horizon + predictdays for the scenario's predictdays.
struct DemandSeries {
  int t_ext = 0;
  int products = 0;
  int retailers = 0;
  int sim_horizon = 0;
  Tensor3 values;  // [t_ext][products][retailers], kilograms, all >= 0

  double at(int t, int k, int i) const { return values.at(t, k, i); }
  Eigen::Map<const Eigen::ArrayXd> day_product(int t, int k) const { return values.slice(t, k); }
};

/// Deterministic sub-seed for a named stream, so one scenario seed drives
/// demand sampling, attribute sampling, splits, and training independently.
uint64_t derive_seed(uint64_t master, std::string_view tag);

// ---------------------------------------------------------------------------
// Artificial demand

struct ArtificialDemandParams {
  int products = 0;
  int retailers = 0;
  int horizon = 300;      // T
  int predictdays = 14;   // tail length beyond T
  double base_level = 10.0;  // C, kilograms
  double period = 365.0;
};

/// demand[t][k][i] = (1 + cos(2*pi*(t + off_k)/period) * fluc_{k,i}) * C
/// with off_k ~ U[0, period) per product and fluc_{k,i} ~ U[0,1).
struct ArtificialDemand {
  DemandSeries series;
  Eigen::ArrayXd offset;        // per product
  Eigen::MatrixXd fluctuation;  // (products, retailers)
};

ArtificialDemand gen_artificial_demand(const ArtificialDemandParams& params, uint64_t seed);

// ---------------------------------------------------------------------------
// Order-history ingestion (one product per row)

struct OrderRecord {
  int64_t customer = 0;
  int64_t product = 0;
  int day = 0;  // days since the customer's first order
  int dow = 0;  // 0..6
};

struct IngestResult {
  std::vector<OrderRecord> rows;
  std::vector<std::string> row_errors;  // "line N: reason", rows skipped
};

/// Parses delimited text with columns customer_id, product_id,
/// days_since_first_order, day_of_week (header optional; comma or tab).
/// Structural problems (missing column) throw; bad rows are collected.
IngestResult ingest_orders(std::istream& in);
IngestResult ingest_orders_file(const std::string& path);

// ---------------------------------------------------------------------------
// Preprocessing pipeline

struct PreprocessParams {
  int min_span = 350;            // keep customers with order span > this
  int first_order_window = 15;   // satisfied by week-one alignment; recorded
  int retailer_count = 200;      // customer groups overall (split in half later)
  int product_count = 200;       // products kept by seasonality rank
  int64_t order_count_min = 200;
  int64_t order_count_max = 20000;
  int season_window = 70;
  int cut_head = 7;
  double per_product_total = 30000.0;  // kilograms per product after scaling
  int horizon = 300;
  int predictdays = 14;
};

struct SplitData {
  DemandSeries demand;
  std::vector<int64_t> product_ids;                  // original ids, in tensor order
  std::vector<std::vector<int64_t>> retailer_customers;  // original ids per group
};

struct PreprocessResult {
  SplitData train;
  SplitData eval;
  Tensor3 scaled;  // full pre-split tensor [span][product][group], post-scaling
  std::vector<int64_t> scaled_product_ids;
  std::map<std::string, int64_t> stage_counts;
};

/// Runs the full pipeline: span filter, calendar alignment, customer
/// grouping, order-count band, seasonality ranking, head cut, per-product
/// scaling, and the disjoint train/eval split. Errors name the failing stage.
PreprocessResult preprocess_orders(const std::vector<OrderRecord>& rows,
                                   const PreprocessParams& params, uint64_t seed);

// ---------------------------------------------------------------------------
// Attribute sampling

struct AttributeRanges {
  double price_min = 1.0, price_max = 10.0;
  double stockcost_min = 0.05, stockcost_max = 0.5;
  int delay_min = 1, delay_max = 5;          // factory lead time, days
  double trucksize_min = 50.0, trucksize_max = 500.0;
  int retailer_delay_min = 1, retailer_delay_max = 3;
  double bs_mult = 1.5;
  double bs_slack = 1.0;
  double bs_floor = 1.0;  // keeps basestock > 0 for zero-demand pairs
};

struct ScenarioAttributes {
  std::vector<ProductSpec> products;
  std::vector<RetailerSpec> retailers;
};

/// Uniform draws per the ranges; basestock_{k,i} =
/// max(bs_floor, bs_mult * mean_daily_demand(k,i) * (retailer_delay + bs_slack)).
ScenarioAttributes sample_attributes(const DemandSeries& demand, const AttributeRanges& ranges,
                                     uint64_t seed);

// ---------------------------------------------------------------------------
// Prediction features

/// Future day-total demand, physical layout [T][P][predictdays]:
/// at(t, k, j) = sum_i demand[t+1+j][k][i]. The window for a day-t order
/// decision is the contiguous slice (t, k, :).
Tensor3 build_predictions(const DemandSeries& demand, int predictdays);

}  // namespace chainsim

#pragma once

#include <Eigen/Core>

#include <algorithm>

#include "chainsim/errors.hpp"

// Single-day kernels for one warehouse serving R retailers with P products.
// Everything here is a pure function over small dense vectors; the simulator
// and the training environment are thin day loops over these ops.
//
// Time convention: a pipeline is a FIFO indexed by days-until-arrival.
// Entry 0 is received at the next morning receipt; an order pushed at the
// end of day t therefore arrives the morning of day t+delay. Ordering
// policies are queried on the end-of-day state (post-shipping), so the
// en-route sum they see covers exactly the quantities not yet delivered
// at the moment of ordering.

namespace chainsim {

using Eigen::ArrayXd;

/// Per-product economic attributes. delay is the factory lead time in days.
struct ProductSpec {
  double price = 0.0;
  double stockcost = 0.0;
  int delay = 1;
};

/// Per-retailer attributes. basestock[k] is the target inventory position
/// for product k; trucksize is the minimum (and exact) total truck load.
struct RetailerSpec {
  double trucksize = 0.0;
  int delay = 1;
  ArrayXd basestock;
};

/// Warehouse-side state for one product at a day boundary.
/// pipeline has length delay; pipeline[0] arrives at the next receipt.
struct WarehouseProductState {
  double stock = 0.0;
  ArrayXd pipeline;
};

/// Retailer-side state for one product. inbound mirrors pipeline above
/// (length = retailer delay, inbound[0] arrives next).
struct RetailerProductState {
  double stock = 0.0;
  ArrayXd inbound;
};

/// One day's profit decomposition for one product. gain == profit - inventory_cost
/// holds exactly in the stored representation because gain is computed as that
/// subtraction and never rederived.
struct DayGain {
  double profit = 0.0;
  double inventory_cost = 0.0;
  double gain = 0.0;
};

/// Left-to-right sum. All reductions that feed simulation state go through
/// this so results are independent of Eigen's vectorized reduction order.
inline double seq_sum(const Eigen::Ref<const ArrayXd>& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i];
  return s;
}

inline WarehouseProductState make_warehouse_state(int delay, double stock = 0.0) {
  require(delay >= 1, "product delay must be >= 1");
  WarehouseProductState st;
  st.stock = require_nonneg(stock, "warehouse stock");
  st.pipeline = ArrayXd::Zero(delay);
  return st;
}

inline RetailerProductState make_retailer_state(int delay, double stock) {
  require(delay >= 1, "retailer delay must be >= 1");
  RetailerProductState st;
  st.stock = require_nonneg(stock, "retailer stock");
  st.inbound = ArrayXd::Zero(delay);
  return st;
}

/// Pops the front of a pipeline (the quantity arriving this morning),
/// shifts the rest forward and leaves a zero slot at the back for the
/// day's own order. Returns the arrived quantity.
inline double advance_pipeline(ArrayXd& pipeline) {
  require(pipeline.size() >= 1, "pipeline must be non-empty");
  const double arrival = pipeline[0];
  for (Eigen::Index j = 0; j + 1 < pipeline.size(); ++j) pipeline[j] = pipeline[j + 1];
  pipeline[pipeline.size() - 1] = 0.0;
  return require_nonneg(arrival, "pipeline arrival");
}

/// On-hand stock plus every pipeline entry not yet arrived.
inline double inventory_position(const WarehouseProductState& st) {
  return st.stock + seq_sum(st.pipeline);
}

/// Sum of shipments still en route to a retailer.
inline double in_transit(const RetailerProductState& st) {
  return seq_sum(st.inbound);
}

/// Proportional rationing of stock_plus across requests:
///   result[i] = min(1, stock_plus / sum(requests)) * requests[i]
/// When requests sum to zero the result is all zeros. When stock covers the
/// total, requests are returned verbatim so full fulfillment is exact.
inline ArrayXd allocate_shipments(double stock_plus, const Eigen::Ref<const ArrayXd>& requests) {
  stock_plus = require_nonneg(stock_plus, "stock_plus");
  for (Eigen::Index i = 0; i < requests.size(); ++i) require_nonneg(requests[i], "request");
  const double total = seq_sum(requests);
  if (total <= 0.0) return ArrayXd::Zero(requests.size());
  if (total <= stock_plus) return requests.cwiseMax(0.0);
  const double factor = stock_plus / total;
  ArrayXd out(requests.size());
  for (Eigen::Index i = 0; i < requests.size(); ++i) out[i] = factor * std::max(requests[i], 0.0);
  return out;
}

/// Sell against demand: sales = min(demand, stock_plus).
struct SellResult {
  double sales = 0.0;
  double remaining = 0.0;
};

inline SellResult retailer_sell(double stock_plus, double demand) {
  stock_plus = require_nonneg(stock_plus, "retailer stock");
  demand = require_nonneg(demand, "demand");
  SellResult r;
  r.sales = std::min(demand, stock_plus);
  r.remaining = stock_plus - r.sales;
  return r;
}

/// Shortfall against the base-stock target, counting stock on hand (post-sales)
/// and shipments still en route:
///   lack = max(0, basestock - stock - in_transit)
inline double retailer_lack(double basestock, double stock, double in_transit_sum) {
  require(basestock > 0.0, "basestock must be positive");
  stock = require_nonneg(stock, "retailer stock");
  in_transit_sum = require_nonneg(in_transit_sum, "in-transit sum");
  return std::max(0.0, basestock - stock - in_transit_sum);
}

/// Truck-normalized requests. A truck is dispatched only when the total lack
/// reaches trucksize; the load then equals trucksize exactly, split across
/// products in proportion to their lacks:
///   request[k] = (trucksize / sum(lacks)) * lacks[k]
inline ArrayXd retailer_requests(const Eigen::Ref<const ArrayXd>& lacks, double trucksize) {
  require(trucksize > 0.0, "trucksize must be positive");
  for (Eigen::Index k = 0; k < lacks.size(); ++k) require_nonneg(lacks[k], "lack");
  const double total = seq_sum(lacks);
  if (total < trucksize) return ArrayXd::Zero(lacks.size());
  const double factor = trucksize / total;
  ArrayXd out(lacks.size());
  for (Eigen::Index k = 0; k < lacks.size(); ++k) out[k] = factor * std::max(lacks[k], 0.0);
  return out;
}

/// One warehouse day for one product, with the day's order already decided:
/// receive the pipeline arrival, ship against requests, append order_today.
struct WarehouseDayResult {
  WarehouseProductState state;
  ArrayXd shipments;
  DayGain gain;
};

inline WarehouseDayResult warehouse_day(const WarehouseProductState& st, const ProductSpec& spec,
                                        double order_today, const Eigen::Ref<const ArrayXd>& requests) {
  order_today = require_nonneg(order_today, "order");
  WarehouseDayResult r;
  r.state = st;
  const double arrival = advance_pipeline(r.state.pipeline);
  const double stock_plus = st.stock + arrival;
  r.shipments = allocate_shipments(stock_plus, requests);
  const double shipped = seq_sum(r.shipments);
  // Rationing ships everything; the subtraction can leave a rounding residue
  // of either sign, and end-of-day stock is zero by definition then.
  r.state.stock = std::max(0.0, stock_plus - shipped);
  r.state.pipeline[r.state.pipeline.size() - 1] = order_today;
  r.gain.profit = spec.price * shipped;
  r.gain.inventory_cost = spec.stockcost * r.state.stock;
  r.gain.gain = r.gain.profit - r.gain.inventory_cost;
  return r;
}

}  // namespace chainsim

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <span>
#include <vector>

#include "chainsim/ordering_policy.hpp"
#include "chainsim/simulator.hpp"

namespace chainsim {

/// Order-up-to rule: bring the inventory position back to the target.
inline double base_stock_order(double basestock_value, double inventory_position) {
  return std::max(0.0, basestock_value - inventory_position);
}

/// Per-product warehouse base-stock targets:
///   B_k = mean daily request* of product k * x * delay_k
/// with x the tuned demand-fraction multiplier.
Eigen::ArrayXd compute_base_stock_values(const ScenarioConfig& config,
                                         const PrecomputeResult& pre, double x);

class BaseStockPolicy : public OrderingPolicy {
 public:
  explicit BaseStockPolicy(Eigen::ArrayXd values);

  double order_quantity(int day, int product, double inventory_position,
                        std::span<const double> predictions) override;

  const Eigen::ArrayXd& values() const { return values_; }

 private:
  Eigen::ArrayXd values_;
};

/// Clairvoyant upper-bound policy. It schedules arrivals to equal each day's
/// total request* exactly: the pipeline is pre-seeded with the first delay
/// day totals and every evening order covers the total due delay days later.
/// On the full simulator this fulfills every request with zero end-of-day
/// stock, so no profit is missed and no inventory cost is paid.
class OraclePolicy : public OrderingPolicy {
 public:
  explicit OraclePolicy(const PrecomputeResult& pre);

  void begin_episode(const ScenarioConfig& config) override;
  Eigen::ArrayXd initial_pipeline(int product, int delay) override;
  double order_quantity(int day, int product, double inventory_position,
                        std::span<const double> predictions) override;

 private:
  Eigen::MatrixXd total_by_day_;  // (horizon, products)
  std::vector<int> delays_;       // per product, captured at episode start
};

}  // namespace chainsim

#include "chainsim/policies.hpp"

namespace chainsim {

Eigen::ArrayXd compute_base_stock_values(const ScenarioConfig& config,
                                         const PrecomputeResult& pre, double x) {
  require(x >= 0.0, "base-stock multiplier must be >= 0");
  const int P = static_cast<int>(config.products.size());
  require(pre.mean_daily_request.size() == P,
          "precompute does not match the scenario's product count");
  Eigen::ArrayXd values(P);
  for (int k = 0; k < P; ++k)
    values[k] = pre.mean_daily_request[k] * x * config.products[k].delay;
  return values;
}

BaseStockPolicy::BaseStockPolicy(Eigen::ArrayXd values) : values_(std::move(values)) {
  require(values_.size() > 0, "base-stock values must not be empty");
  for (Eigen::Index k = 0; k < values_.size(); ++k)
    require_nonneg(values_[k], "base-stock value");
}

double BaseStockPolicy::order_quantity(int day, int product, double inventory_position,
                                       std::span<const double> predictions) {
  (void)day;
  (void)predictions;
  require(product >= 0 && product < values_.size(), "product index out of range");
  return base_stock_order(values_[product], inventory_position);
}

OraclePolicy::OraclePolicy(const PrecomputeResult& pre) : total_by_day_(pre.total_by_day) {
  require(total_by_day_.rows() > 0 && total_by_day_.cols() > 0, "empty precompute");
}

void OraclePolicy::begin_episode(const ScenarioConfig& config) {
  require(static_cast<Eigen::Index>(config.products.size()) == total_by_day_.cols(),
          "scenario product count does not match the precompute");
  delays_.resize(config.products.size());
  for (std::size_t k = 0; k < config.products.size(); ++k)
    delays_[k] = config.products[k].delay;
}

Eigen::ArrayXd OraclePolicy::initial_pipeline(int product, int delay) {
  require(product >= 0 && product < total_by_day_.cols(), "product index out of range");
  Eigen::ArrayXd pipe = Eigen::ArrayXd::Zero(delay);
  for (int j = 0; j < delay && j < total_by_day_.rows(); ++j)
    pipe[j] = total_by_day_(j, product);
  return pipe;
}

double OraclePolicy::order_quantity(int day, int product, double inventory_position,
                                    std::span<const double> predictions) {
  (void)inventory_position;
  (void)predictions;
  require(!delays_.empty(), "order_quantity called before begin_episode");
  require(product >= 0 && product < total_by_day_.cols(), "product index out of range");
  require(day >= 0, "day must be >= 0");
  // This evening's order arrives delay days later; cover that day's total
  // request exactly, and nothing once arrivals would fall past the horizon.
  const int arrive = day + delays_[static_cast<std::size_t>(product)];
  if (arrive >= total_by_day_.rows()) return 0.0;
  return total_by_day_(arrive, product);
}

}  // namespace chainsim

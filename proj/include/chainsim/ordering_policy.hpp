#pragma once

#include <Eigen/Core>

#include <span>

#include "chainsim/scenario.hpp"

namespace chainsim {

/// A per-product ordering rule queried once per simulated day, on the
/// end-of-day state. Implementations must be deterministic given their own
/// internal state and the inputs (stochastic policies hold a seeded RNG).
class OrderingPolicy {
 public:
  virtual ~OrderingPolicy() = default;

  /// Called once before day 0 of a simulation run.
  virtual void begin_episode(const ScenarioConfig&) {}

  /// Initial warehouse pipeline for product k (length = the product's delay).
  /// Defaults to an empty (all-zero) pipeline; the oracle pre-seeds it.
  virtual Eigen::ArrayXd initial_pipeline(int product, int delay) {
    (void)product;
    return Eigen::ArrayXd::Zero(delay);
  }

  /// The day's order, decided on the end-of-day inventory position
  /// (on-hand stock plus orders still en route). predictions holds the next
  /// predictdays day-total demands for this product. Must be >= 0.
  virtual double order_quantity(int day, int product, double inventory_position,
                                std::span<const double> predictions) = 0;
};

}  // namespace chainsim

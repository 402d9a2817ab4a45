#pragma once

#include <Eigen/Core>

#include <span>

#include "chainsim/core_model.hpp"
#include "chainsim/errors.hpp"
#include "chainsim/scenario.hpp"

namespace chainsim {

/// Length of an agent observation: price, stock cost, delay, inventory
/// position, then the demand-prediction window.
inline int observation_size(int predictdays) { return 4 + predictdays; }

/// Normalized observation vector for one product on one evening.
/// Attribute entries are divided by the scale midpoints, the position and the
/// predictions by the kilogram scale (the order cap).
inline Eigen::ArrayXd build_observation(const ProductSpec& spec,
                                        const ObservationScale& scale,
                                        double inventory_position,
                                        std::span<const double> predictions) {
  require(scale.price > 0.0 && scale.stockcost > 0.0 && scale.delay > 0.0 &&
              scale.kilograms > 0.0,
          "build_observation: all scale entries must be positive");
  Eigen::ArrayXd obs(4 + static_cast<int>(predictions.size()));
  obs[0] = spec.price / scale.price;
  obs[1] = spec.stockcost / scale.stockcost;
  obs[2] = static_cast<double>(spec.delay) / scale.delay;
  obs[3] = inventory_position / scale.kilograms;
  for (std::size_t j = 0; j < predictions.size(); ++j)
    obs[4 + static_cast<Eigen::Index>(j)] = predictions[j] / scale.kilograms;
  return obs;
}

inline Eigen::ArrayXd build_observation(const WarehouseProductState& state,
                                        const ProductSpec& spec,
                                        const ObservationScale& scale,
                                        std::span<const double> predictions) {
  return build_observation(spec, scale, inventory_position(state), predictions);
}

/// Maps the discrete agent action to kilograms ordered: 0 orders nothing,
/// 1 orders the cap.
inline double decode_action(int action, double maxorder) {
  require(action == 0 || action == 1, "decode_action: action must be 0 or 1");
  require(maxorder > 0.0, "decode_action: maxorder must be positive");
  return action == 0 ? 0.0 : maxorder;
}

}  // namespace chainsim

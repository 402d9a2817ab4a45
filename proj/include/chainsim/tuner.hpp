#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "chainsim/simulator.hpp"

namespace chainsim {

struct TunePoint {
  double x = 0.0;
  double gain = 0.0;
};

struct TuneResult {
  double best_x = 0.0;
  double best_gain = 0.0;
  std::vector<TunePoint> history;  // every evaluation, in order
};

/// Maximizes a scalar objective over [lo, hi] with a fixed evaluation
/// budget: a coarse evenly spaced grid first (up to 9 points), then
/// golden-section refinement inside the bracket around the best grid point.
/// budget counts objective evaluations and must be >= 3; a budget at or
/// below the grid size spends everything on the even grid.
TuneResult tune_x(const std::function<double(double)>& objective, double lo, double hi,
                  int budget);

/// Tunes the base-stock multiplier x on the full simulator (objective:
/// mean per-day gain) and returns the per-product targets at the optimum.
struct BaseStockTune {
  TuneResult tune;
  Eigen::ArrayXd values;  // base-stock targets at best_x
};
BaseStockTune tune_base_stock(const ScenarioConfig& config, const DemandSeries& demand,
                              const PrecomputeResult& pre, int budget, double lo = 0.0,
                              double hi = 4.0);

}  // namespace chainsim

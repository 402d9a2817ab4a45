#include "chainsim/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chainsim/policies.hpp"

namespace chainsim {

namespace {
constexpr int kGridPoints = 9;
// 1/phi, the golden-section interior ratio.
const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
}  // namespace

TuneResult tune_x(const std::function<double(double)>& objective, double lo, double hi,
                  int budget) {
  require(hi > lo, "tune_x: empty interval");
  require(budget >= 3, "tune_x: budget must be >= 3");

  TuneResult out;
  out.best_gain = -std::numeric_limits<double>::infinity();
  auto eval = [&](double x) {
    const double g = objective(x);
    out.history.push_back({x, g});
    if (g > out.best_gain) {
      out.best_gain = g;
      out.best_x = x;
    }
    return g;
  };

  const int grid = std::min(budget, kGridPoints);
  for (int j = 0; j < grid; ++j) eval(lo + (hi - lo) * j / (grid - 1));
  int remaining = budget - grid;
  if (remaining == 0) return out;

  // Bracket one grid cell to each side of the best coarse point.
  const double h = (hi - lo) / (grid - 1);
  double a = std::max(lo, out.best_x - h);
  double b = std::min(hi, out.best_x + h);

  if (remaining == 1) {
    eval(0.5 * (a + b));
    return out;
  }

  // Golden-section refinement: two interior points, then one new
  // evaluation per shrink.
  double c = b - (b - a) * kInvPhi;
  double d = a + (b - a) * kInvPhi;
  double fc = eval(c);
  double fd = eval(d);
  remaining -= 2;
  while (remaining > 0) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * kInvPhi;
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * kInvPhi;
      fd = eval(d);
    }
    --remaining;
  }
  return out;
}

BaseStockTune tune_base_stock(const ScenarioConfig& config, const DemandSeries& demand,
                              const PrecomputeResult& pre, int budget, double lo, double hi) {
  auto objective = [&](double x) {
    BaseStockPolicy policy(compute_base_stock_values(config, pre, x));
    return simulate_full(config, demand, policy).daily_gain();
  };
  BaseStockTune out;
  out.tune = tune_x(objective, lo, hi, budget);
  out.values = compute_base_stock_values(config, pre, out.tune.best_x);
  return out;
}

}  // namespace chainsim

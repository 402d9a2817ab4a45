#include <doctest.h>

#include <cmath>

#include "chainsim/policies.hpp"
#include "chainsim/tuner.hpp"
#include "test_support.hpp"

using namespace chainsim;

TEST_CASE("grid-then-golden search converges on a smooth unimodal objective") {
  auto f = [](double x) { return -(x - 2.3) * (x - 2.3); };
  const TuneResult res = tune_x(f, 0.0, 4.0, 20);
  CHECK(std::abs(res.best_x - 2.3) < 0.05);
  CHECK(res.best_gain == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(res.history.size() == 20);
}

TEST_CASE("a budget at or below the grid size spends it on even spacing") {
  std::vector<double> xs;
  auto f = [&xs](double x) {
    xs.push_back(x);
    return -x;
  };
  const TuneResult res = tune_x(f, 0.0, 4.0, 5);
  REQUIRE(xs.size() == 5);
  CHECK(xs[0] == 0.0);
  CHECK(xs[1] == 1.0);
  CHECK(xs[2] == 2.0);
  CHECK(xs[3] == 3.0);
  CHECK(xs[4] == 4.0);
  CHECK(res.best_x == 0.0);  // decreasing objective
  CHECK(res.history.size() == 5);
}

TEST_CASE("every refinement evaluation is recorded against the budget") {
  auto f = [](double x) { return -(x - 1.7) * (x - 1.7); };
  CHECK(tune_x(f, 0.0, 4.0, 9).history.size() == 9);
  CHECK(tune_x(f, 0.0, 4.0, 10).history.size() == 10);  // single midpoint probe
  CHECK(tune_x(f, 0.0, 4.0, 14).history.size() == 14);
  CHECK(tune_x(f, 0.0, 4.0, 3).history.size() == 3);
}

TEST_CASE("an exact grid optimum survives the refinement phase") {
  // peak precisely on a coarse grid point; every golden probe is worse
  auto f = [](double x) { return -std::abs(x - 1.0); };
  const TuneResult res = tune_x(f, 0.0, 4.0, 16);
  CHECK(res.best_x == 1.0);
  CHECK(res.best_gain == 0.0);
}

TEST_CASE("a monotone objective pins the boundary") {
  auto f = [](double x) { return x; };
  const TuneResult res = tune_x(f, 0.0, 4.0, 12);
  CHECK(res.best_x == 4.0);
  CHECK(res.best_gain == 4.0);
}

TEST_CASE("tuning rejects bad intervals and starved budgets") {
  auto f = [](double x) { return x; };
  CHECK_THROWS_AS(tune_x(f, 1.0, 1.0, 5), ContractViolation);
  CHECK_THROWS_AS(tune_x(f, 2.0, 1.0, 5), ContractViolation);
  CHECK_THROWS_AS(tune_x(f, 0.0, 4.0, 2), ContractViolation);
}

// Constant scenario, rate 4, lead time 3: the per-day gain is maximized at
// multiplier exactly 1 (any less loses sales at price 5, any more holds
// stock at 0.1/kg/day), and 1.0 sits on the coarse grid.
TEST_CASE("base-stock tuning lands on the exact steady-state multiplier") {
  const ScenarioConfig cfg = testsup::constant_config(4.0, 3, 40);
  const DemandSeries demand = testsup::constant_series(4.0, 40, 14);
  const PrecomputeResult pre = precompute_request_star(cfg, demand);

  const BaseStockTune tuned = tune_base_stock(cfg, demand, pre, 12);
  CHECK(tuned.tune.best_x == 1.0);
  REQUIRE(tuned.values.size() == 1);
  CHECK(tuned.values[0] == 12.0);
  CHECK(tuned.tune.history.size() == 12);

  // the recorded optimum reproduces under replay
  BaseStockPolicy policy(tuned.values);
  const EpisodeTrace trace = simulate_full(cfg, demand, policy);
  CHECK(trace.daily_gain() == tuned.tune.best_gain);
}

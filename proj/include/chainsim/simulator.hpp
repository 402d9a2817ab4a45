#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <vector>

#include "chainsim/core_model.hpp"
#include "chainsim/ordering_policy.hpp"
#include "chainsim/scenario.hpp"
#include "chainsim/tensor.hpp"

namespace chainsim {

/// Which (day, retailer) pairs dispatch a truck in the infinite-warehouse
/// pass. Derived from request*: a truck ran iff the retailer requested a
/// positive total that day.
struct TruckSchedule {
  int horizon = 0;
  int retailers = 0;
  std::vector<std::uint8_t> on;  // horizon * retailers, day-major

  bool truck_day(int day, int retailer) const {
    return on[static_cast<std::size_t>(day) * retailers + retailer] != 0;
  }
};

/// Output of the infinite-warehouse retailer pass: the requests every
/// retailer would place if the warehouse always shipped in full.
struct PrecomputeResult {
  Tensor3 request_star;               // [horizon][products][retailers]
  TruckSchedule schedule;             // derived support of request_star
  Eigen::MatrixXd total_by_day;      // (horizon, products) request* summed over retailers
  Eigen::ArrayXd mean_daily_request;  // per product, total / horizon
  double maxorder = 0.0;              // 2 * grand mean daily request per product
};

/// Runs every retailer against an always-full warehouse for the scenario
/// horizon and records the requests. O(horizon * products * retailers), done
/// once per scenario.
PrecomputeResult precompute_request_star(const ScenarioConfig& config,
                                         const DemandSeries& demand);

/// Rebuilds the derived fields (schedule, totals, maxorder) from a request*
/// tensor loaded from disk.
PrecomputeResult derive_precompute(Tensor3 request_star);

void save_precompute(const std::filesystem::path& dir, const PrecomputeResult& pre);
PrecomputeResult load_precompute(const std::filesystem::path& dir);

/// The approximate per-(day, retailer) request used by the training
/// environment: the retailer's full lack on precomputed truck days, nothing
/// otherwise. Days past the schedule horizon place no requests.
inline double approx_request(const TruckSchedule& schedule, int day, int retailer,
                             double lack) {
  if (day >= schedule.horizon) return 0.0;
  return schedule.truck_day(day, retailer) ? lack : 0.0;
}

/// Per-day, per-product record of a full-simulator episode. Vectors are
/// day-major (index day * products + product).
struct EpisodeTrace {
  int horizon = 0;
  int products = 0;
  std::vector<double> order;
  std::vector<double> request_total;
  std::vector<double> ship_total;
  std::vector<double> stock;           // warehouse end-of-day stock
  std::vector<double> profit;
  std::vector<double> inventory_cost;
  std::vector<double> gain;

  bool has_detail = false;
  Tensor3 requests;  // [horizon][products][retailers], only if recorded
  Tensor3 ships;

  std::size_t idx(int day, int product) const {
    return static_cast<std::size_t>(day) * products + product;
  }
  /// Sum of gain over all days and products.
  double total_gain() const;
  /// total_gain averaged over days (the per-day figure used in reports).
  double daily_gain() const;
};

/// Simulates the full chain (every product, every retailer, finite
/// warehouse) for the scenario horizon, querying the policy each evening.
EpisodeTrace simulate_full(const ScenarioConfig& config, const DemandSeries& demand,
                           OrderingPolicy& policy, bool record_detail = false);

/// Re-runs an episode with a fixed order sequence (day-major, as recorded in
/// a trace) instead of a policy. Used to cross-check the day kernel.
EpisodeTrace replay_orders(const ScenarioConfig& config, const DemandSeries& demand,
                           const std::vector<double>& orders,
                           bool record_detail = false);

/// Writes a trace as TSV, one row per (day, product).
void export_trace(const std::filesystem::path& file, const EpisodeTrace& trace);

struct EnvStep {
  Eigen::ArrayXd observation;
  double reward = 0.0;
  bool done = false;
};

/// Single-product training environment with the O(retailers) approximation:
/// trucks run on the precomputed schedule and requests skip the truck-load
/// normalization. One episode covers days 1..horizon; reset runs day 0
/// (which needs no decision) and returns its end-of-day observation.
class ApproxEnv {
 public:
  ApproxEnv(const ScenarioConfig& config, const DemandSeries& demand,
            const TruckSchedule& schedule, const Tensor3& predictions);

  int products() const { return static_cast<int>(config_->products.size()); }
  int horizon() const { return config_->horizon; }

  /// Starts an episode for one product. Runs day 0 and returns its evening
  /// observation (the input to the first order decision).
  const Eigen::ArrayXd& reset(int product);

  /// Places the pending evening order, advances one day, and returns that
  /// day's observation, reward (the day's gain) and the episode-end flag.
  EnvStep step(double order_kg);

  // introspection for tests and traces
  int day() const { return day_; }
  int product() const { return product_; }
  bool done() const { return done_; }
  const WarehouseProductState& warehouse() const { return warehouse_; }
  const std::vector<RetailerProductState>& retailer_states() const { return retailers_; }
  const Eigen::ArrayXd& last_requests() const { return requests_; }
  const Eigen::ArrayXd& last_shipments() const { return ships_; }
  double last_reward() const { return reward_; }

 private:
  double run_day();
  void refresh_observation();

  const ScenarioConfig* config_;
  const DemandSeries* demand_;
  const TruckSchedule* schedule_;
  const Tensor3* predictions_;

  int product_ = -1;
  int day_ = -1;
  bool done_ = true;
  WarehouseProductState warehouse_;
  std::vector<RetailerProductState> retailers_;
  Eigen::ArrayXd requests_;
  Eigen::ArrayXd ships_;
  Eigen::ArrayXd observation_;
  double reward_ = 0.0;
};

}  // namespace chainsim

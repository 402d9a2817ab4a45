#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "chainsim/mlp.hpp"
#include "chainsim/ordering_policy.hpp"
#include "chainsim/simulator.hpp"

namespace chainsim {

/// Generalized advantage estimation over one finite episode (terminal value
/// zero). returns[t] = advantages[t] + values[t].
struct GaeResult {
  Eigen::ArrayXd advantages;
  Eigen::ArrayXd returns;
};
GaeResult compute_gae(const Eigen::Ref<const Eigen::ArrayXd>& rewards,
                      const Eigen::Ref<const Eigen::ArrayXd>& values, double gamma,
                      double lambda);

/// One sampled interaction: the action drawn from the policy head plus the
/// quantities PPO needs later.
struct StepSample {
  int action = 0;
  double logp = 0.0;
  double value = 0.0;
};
StepSample policy_step(const PolicyNet& net, const Eigen::Ref<const Eigen::VectorXd>& obs,
                       std::mt19937_64& rng);
int greedy_action(const PolicyNet& net, const Eigen::Ref<const Eigen::VectorXd>& obs);

/// One episode of experience, day-major.
struct RolloutBuffer {
  Eigen::MatrixXd obs;       // (steps, obs_size)
  std::vector<int> actions;
  Eigen::ArrayXd logp;
  Eigen::ArrayXd values;
  Eigen::ArrayXd rewards;    // already scaled for the optimizer
  Eigen::ArrayXd advantages; // normalized inside ppo_update
  Eigen::ArrayXd returns;

  int size() const { return static_cast<int>(actions.size()); }
};

struct PpoConfig {
  double clip = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  int epochs = 10;
  int minibatch = 64;
};

struct UpdateStats {
  double policy_loss = 0.0;  // clipped surrogate, averaged over samples
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
};

/// Clipped-surrogate PPO update over one buffer: epochs passes of shuffled
/// minibatches, one Adam step per minibatch. Advantages are normalized over
/// the whole buffer first. Stats are averaged over the final epoch.
UpdateStats ppo_update(PolicyNet& net, RolloutBuffer& buf, const PpoConfig& cfg, double lr,
                       std::mt19937_64& rng);

struct TrainConfig {
  std::int64_t total_steps = 200000;  // environment steps
  std::int64_t eval_every = 10000;
  int eval_products = 10;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double lr = 3e-4;  // decayed linearly to zero over total_steps
  PpoConfig ppo;
  int hidden = 100;
  std::uint64_t seed = 0;
};

/// Greedy evaluation curve: environment step count vs mean per-day reward
/// over the evaluation products.
struct TrainingLog {
  std::vector<std::int64_t> step;
  std::vector<double> mean_reward;
};

struct TrainResult {
  PolicyNet net;
  TrainingLog log;
  std::int64_t steps_run = 0;
  int episodes = 0;
};

/// Trains the ordering policy on the approximate environment: one uniformly
/// sampled product per episode, a PPO update after every episode, greedy
/// evaluation every eval_every steps. Rewards are scaled by
/// 1 / (price midpoint * maxorder) inside the optimizer only; the log
/// reports raw per-day rewards.
TrainResult train_ppo(const ScenarioConfig& config, const DemandSeries& demand,
                      const PrecomputeResult& pre, const TrainConfig& tc);

void save_training_log(const std::filesystem::path& file, const TrainingLog& log);
TrainingLog load_training_log(const std::filesystem::path& file);

/// Deterministic (greedy) adapter so a trained network can drive the full
/// simulator through the common policy interface.
class NeuralOrderingPolicy : public OrderingPolicy {
 public:
  NeuralOrderingPolicy(PolicyNet net, double maxorder);

  void begin_episode(const ScenarioConfig& config) override;
  double order_quantity(int day, int product, double inventory_position,
                        std::span<const double> predictions) override;

 private:
  PolicyNet net_;
  double maxorder_ = 0.0;
  std::vector<ProductSpec> products_;
  ObservationScale scale_;
};

}  // namespace chainsim

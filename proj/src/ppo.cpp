#include "chainsim/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "chainsim/demand.hpp"
#include "chainsim/observation.hpp"

namespace chainsim {

GaeResult compute_gae(const Eigen::Ref<const Eigen::ArrayXd>& rewards,
                      const Eigen::Ref<const Eigen::ArrayXd>& values, double gamma,
                      double lambda) {
  require(rewards.size() == values.size() && rewards.size() > 0,
          "rewards and values must be equal-length and non-empty");
  const Eigen::Index n = rewards.size();
  GaeResult g;
  g.advantages.resize(n);
  double acc = 0.0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const double next_value = (t + 1 < n) ? values[t + 1] : 0.0;
    const double delta = rewards[t] + gamma * next_value - values[t];
    acc = delta + gamma * lambda * acc;
    g.advantages[t] = acc;
  }
  g.returns = g.advantages + values;
  return g;
}

StepSample policy_step(const PolicyNet& net, const Eigen::Ref<const Eigen::VectorXd>& obs,
                       std::mt19937_64& rng) {
  const PolicyNet::Activations act = net.forward(obs);
  const Eigen::Vector2d p = action_probs(act.logits);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  StepSample s;
  s.action = (u(rng) < p[0]) ? 0 : 1;
  s.logp = std::log(std::max(p[s.action], 1e-300));
  s.value = act.value;
  return s;
}

int greedy_action(const PolicyNet& net, const Eigen::Ref<const Eigen::VectorXd>& obs) {
  const PolicyNet::Activations act = net.forward(obs);
  return act.logits[1] > act.logits[0] ? 1 : 0;
}

UpdateStats ppo_update(PolicyNet& net, RolloutBuffer& buf, const PpoConfig& cfg, double lr,
                       std::mt19937_64& rng) {
  const int n = buf.size();
  require(n > 0, "empty rollout buffer");
  require(buf.obs.rows() == n && buf.logp.size() == n && buf.values.size() == n &&
              buf.rewards.size() == n && buf.advantages.size() == n && buf.returns.size() == n,
          "rollout buffer fields have mismatched lengths");
  require(lr >= 0.0, "learning rate must be >= 0");

  // Normalize advantages over the whole buffer.
  const double mean = buf.advantages.mean();
  const double var = (buf.advantages - mean).square().sum() / n;
  const double sd = std::sqrt(var);
  Eigen::ArrayXd adv = (buf.advantages - mean) / (sd + 1e-8);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  UpdateStats stats;
  PolicyNet::Params grads = net.zero_like();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const bool last_epoch = (epoch == cfg.epochs - 1);
    double ep_pol = 0.0, ep_val = 0.0, ep_ent = 0.0, ep_clip = 0.0;

    for (int start = 0; start < n; start += cfg.minibatch) {
      const int count = std::min(cfg.minibatch, n - start);
      for (int b = 0; b < PolicyNet::kBlockCount; ++b) grads[b].setZero();

      for (int m = 0; m < count; ++m) {
        const int i = order[static_cast<std::size_t>(start + m)];
        const PolicyNet::Activations act = net.forward(buf.obs.row(i).transpose());
        const Eigen::Vector2d p = action_probs(act.logits);
        const int a = buf.actions[static_cast<std::size_t>(i)];
        const double logp_new = std::log(std::max(p[a], 1e-300));
        const double ratio = std::exp(logp_new - buf.logp[i]);
        const double A = adv[i];

        const double s1 = ratio * A;
        const double s2 = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * A;
        const double entropy = -(p[0] * std::log(std::max(p[0], 1e-300)) +
                                 p[1] * std::log(std::max(p[1], 1e-300)));
        const double verr = act.value - buf.returns[i];

        // Gradient on the logits. The surrogate only propagates through the
        // unclipped branch; when the clipped branch is active its gradient
        // in the parameters is zero.
        const double coef_pol = (s1 <= s2) ? (-A * ratio / count) : 0.0;
        Eigen::Vector2d dlogits;
        for (int j = 0; j < 2; ++j) {
          const double dlogp = (j == a ? 1.0 : 0.0) - p[j];
          const double dent = -p[j] * (std::log(std::max(p[j], 1e-300)) + entropy);
          dlogits[j] = coef_pol * dlogp - cfg.entropy_coef * dent / count;
        }
        const double dvalue = cfg.value_coef * 2.0 * verr / count;
        net.backward(act, dlogits, dvalue, grads);

        if (last_epoch) {
          ep_pol += -std::min(s1, s2);
          ep_val += verr * verr;
          ep_ent += entropy;
          if (std::abs(ratio - 1.0) > cfg.clip) ep_clip += 1.0;
        }
      }
      net.adam_step(grads, lr);
    }
    if (last_epoch) {
      stats.policy_loss = ep_pol / n;
      stats.value_loss = ep_val / n;
      stats.entropy = ep_ent / n;
      stats.clip_fraction = ep_clip / n;
    }
  }
  return stats;
}

namespace {

double eval_greedy(const PolicyNet& net, ApproxEnv& env, double maxorder, int product) {
  const int T = env.horizon();
  Eigen::VectorXd obs = env.reset(product).matrix();
  double total = 0.0;
  for (int t = 0; t < T; ++t) {
    const int a = greedy_action(net, obs);
    EnvStep s = env.step(decode_action(a, maxorder));
    total += s.reward;
    obs = s.observation.matrix();
  }
  return total / T;
}

}  // namespace

TrainResult train_ppo(const ScenarioConfig& config, const DemandSeries& demand,
                      const PrecomputeResult& pre, const TrainConfig& tc) {
  require(tc.total_steps > 0 && tc.eval_every > 0, "step counts must be positive");
  require(pre.maxorder > 0.0, "precompute has no positive maxorder");

  ScenarioConfig cfg = config;
  cfg.scale.kilograms = pre.maxorder;
  const Tensor3 predictions = build_predictions(demand, cfg.predictdays);
  ApproxEnv env(cfg, demand, pre.schedule, predictions);
  ApproxEnv eval_env(cfg, demand, pre.schedule, predictions);

  const int P = static_cast<int>(cfg.products.size());
  const int T = cfg.horizon;
  const int obs_size = observation_size(cfg.predictdays);

  TrainResult out;
  out.net = PolicyNet(obs_size, tc.hidden, derive_seed(tc.seed, "net-init"));
  std::mt19937_64 product_rng(derive_seed(tc.seed, "product-sampling"));
  std::mt19937_64 action_rng(derive_seed(tc.seed, "action-sampling"));
  std::mt19937_64 shuffle_rng(derive_seed(tc.seed, "minibatch-shuffle"));
  std::mt19937_64 eval_rng(derive_seed(tc.seed, "eval-products"));
  std::uniform_int_distribution<int> pick(0, P - 1);

  // Rewards are scaled only inside the optimizer so gradients are O(1)
  // regardless of prices and order sizes.
  const double reward_scale = 1.0 / (cfg.scale.price * pre.maxorder);

  RolloutBuffer buf;
  buf.obs.resize(T, obs_size);
  buf.actions.assign(static_cast<std::size_t>(T), 0);
  buf.logp.resize(T);
  buf.values.resize(T);
  buf.rewards.resize(T);

  auto run_eval = [&]() {
    double sum = 0.0;
    for (int e = 0; e < tc.eval_products; ++e) {
      const int k = pick(eval_rng);
      sum += eval_greedy(out.net, eval_env, pre.maxorder, k);
    }
    out.log.step.push_back(out.steps_run);
    out.log.mean_reward.push_back(sum / tc.eval_products);
  };

  run_eval();  // untrained baseline at step 0
  std::int64_t since_eval = 0;

  while (out.steps_run < tc.total_steps) {
    const int k = pick(product_rng);
    Eigen::VectorXd obs = env.reset(k).matrix();
    for (int t = 0; t < T; ++t) {
      const StepSample s = policy_step(out.net, obs, action_rng);
      buf.obs.row(t) = obs.transpose();
      buf.actions[static_cast<std::size_t>(t)] = s.action;
      buf.logp[t] = s.logp;
      buf.values[t] = s.value;
      EnvStep es = env.step(decode_action(s.action, pre.maxorder));
      buf.rewards[t] = es.reward * reward_scale;
      obs = es.observation.matrix();
    }
    const GaeResult gae = compute_gae(buf.rewards, buf.values, tc.gamma, tc.gae_lambda);
    buf.advantages = gae.advantages;
    buf.returns = gae.returns;

    const double frac =
        1.0 - static_cast<double>(out.steps_run) / static_cast<double>(tc.total_steps);
    const double lr = tc.lr * std::max(frac, 0.0);
    ppo_update(out.net, buf, tc.ppo, lr, shuffle_rng);

    out.steps_run += T;
    since_eval += T;
    ++out.episodes;
    if (since_eval >= tc.eval_every) {
      run_eval();
      since_eval = 0;
    }
  }
  if (since_eval > 0) run_eval();  // final point
  return out;
}

void save_training_log(const std::filesystem::path& file, const TrainingLog& log) {
  require(log.step.size() == log.mean_reward.size(), "training log columns differ in length");
  std::ofstream out(file, std::ios::binary);
  require(out.good(), "cannot open training log for writing");
  out << "step\tmean_reward\n";
  char buf[64];
  for (std::size_t i = 0; i < log.step.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", log.mean_reward[i]);
    out << log.step[i] << '\t' << buf << '\n';
  }
  require(out.good(), "write to training log failed");
}

TrainingLog load_training_log(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  require(in.good(), "cannot open training log");
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "training log is empty");
  require(line == "step\tmean_reward", "training log has an unexpected header");
  TrainingLog log;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::int64_t step = 0;
    double reward = 0.0;
    require(static_cast<bool>(row >> step >> reward),
            "training log line " + std::to_string(lineno) + " is malformed");
    log.step.push_back(step);
    log.mean_reward.push_back(reward);
  }
  return log;
}

NeuralOrderingPolicy::NeuralOrderingPolicy(PolicyNet net, double maxorder)
    : net_(std::move(net)), maxorder_(maxorder) {
  require(maxorder_ > 0.0, "maxorder must be positive");
}

void NeuralOrderingPolicy::begin_episode(const ScenarioConfig& config) {
  products_ = config.products;
  scale_ = config.scale;
  scale_.kilograms = maxorder_;
  require(observation_size(config.predictdays) == net_.input_size(),
          "scenario predictdays does not match the trained network input");
}

double NeuralOrderingPolicy::order_quantity(int day, int product, double inventory_position,
                                            std::span<const double> predictions) {
  (void)day;
  require(!products_.empty(), "order_quantity called before begin_episode");
  require(product >= 0 && product < static_cast<int>(products_.size()),
          "product index out of range");
  const Eigen::ArrayXd obs =
      build_observation(products_[static_cast<std::size_t>(product)], scale_, inventory_position,
                        predictions);
  const int a = greedy_action(net_, obs.matrix());
  return decode_action(a, maxorder_);
}

}  // namespace chainsim

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>

namespace chainsim {

/// Two-head MLP: shared tanh trunk (two hidden layers), a 2-logit policy
/// head (order nothing / order the cap) and a scalar value head. Parameters
/// are stored as eight dense blocks so the optimizer can treat them
/// uniformly; biases are single-column matrices.
class PolicyNet {
 public:
  enum Block { kW1 = 0, kB1, kW2, kB2, kWp, kBp, kWv, kBv, kBlockCount };
  using Params = std::array<Eigen::MatrixXd, kBlockCount>;

  PolicyNet() = default;
  /// Xavier-uniform trunk, policy head scaled down (0.01) so initial action
  /// probabilities start near uniform, value head Xavier. Biases zero.
  PolicyNet(int input, int hidden, std::uint64_t seed);

  int input_size() const { return input_; }
  int hidden_size() const { return hidden_; }

  struct Activations {
    Eigen::VectorXd x;   // input
    Eigen::VectorXd a1;  // tanh layer 1
    Eigen::VectorXd a2;  // tanh layer 2
    Eigen::Vector2d logits;
    double value = 0.0;
  };
  Activations forward(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Accumulates one sample's parameter gradients given the upstream
  /// gradients on the two logits and on the value output.
  void backward(const Activations& act, const Eigen::Vector2d& dlogits, double dvalue,
                Params& grads) const;

  Params zero_like() const;

  /// One Adam step over every block (beta1 0.9, beta2 0.999, eps 1e-8).
  /// Moment state lives in the net and persists across calls.
  void adam_step(const Params& grads, double lr);

  const Params& params() const { return p_; }
  Params& params() { return p_; }

 private:
  int input_ = 0;
  int hidden_ = 0;
  Params p_;
  Params m_, v_;  // Adam moments, zero until the first step
  std::int64_t adam_t_ = 0;
};

/// Stable softmax of the two logits.
Eigen::Vector2d action_probs(const Eigen::Vector2d& logits);

void save_model(const std::filesystem::path& file, const PolicyNet& net);
PolicyNet load_model(const std::filesystem::path& file);

}  // namespace chainsim

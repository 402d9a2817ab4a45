#include "chainsim/mlp.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "chainsim/errors.hpp"

namespace chainsim {

namespace {

constexpr char kModelMagic[8] = {'S', 'C', 'P', 'O', 'N', 'E', 'T', '1'};
constexpr std::uint32_t kModelVersion = 1;
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

Eigen::MatrixXd xavier(int rows, int cols, double gain, std::mt19937_64& rng) {
  const double limit = gain * std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> u(-limit, limit);
  Eigen::MatrixXd w(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) w(r, c) = u(rng);
  return w;
}

}  // namespace

PolicyNet::PolicyNet(int input, int hidden, std::uint64_t seed) : input_(input), hidden_(hidden) {
  require(input >= 1 && hidden >= 1, "network sizes must be >= 1");
  std::mt19937_64 rng(seed);
  p_[kW1] = xavier(hidden, input, 1.0, rng);
  p_[kB1] = Eigen::MatrixXd::Zero(hidden, 1);
  p_[kW2] = xavier(hidden, hidden, 1.0, rng);
  p_[kB2] = Eigen::MatrixXd::Zero(hidden, 1);
  p_[kWp] = xavier(2, hidden, 0.01, rng);
  p_[kBp] = Eigen::MatrixXd::Zero(2, 1);
  p_[kWv] = xavier(1, hidden, 1.0, rng);
  p_[kBv] = Eigen::MatrixXd::Zero(1, 1);
  m_ = zero_like();
  v_ = zero_like();
}

PolicyNet::Activations PolicyNet::forward(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  require(x.size() == input_, "observation size does not match the network input");
  Activations a;
  a.x = x;
  a.a1 = ((p_[kW1] * x + p_[kB1].col(0)).array().tanh()).matrix();
  a.a2 = ((p_[kW2] * a.a1 + p_[kB2].col(0)).array().tanh()).matrix();
  a.logits = p_[kWp] * a.a2 + p_[kBp].col(0);
  a.value = (p_[kWv] * a.a2)(0) + p_[kBv](0, 0);
  return a;
}

void PolicyNet::backward(const Activations& act, const Eigen::Vector2d& dlogits, double dvalue,
                         Params& grads) const {
  grads[kWp].noalias() += dlogits * act.a2.transpose();
  grads[kBp].col(0) += dlogits;
  grads[kWv].noalias() += dvalue * act.a2.transpose();
  grads[kBv](0, 0) += dvalue;

  Eigen::VectorXd da2 = p_[kWp].transpose() * dlogits + p_[kWv].transpose() * dvalue;
  Eigen::VectorXd dz2 =
      (da2.array() * (1.0 - act.a2.array() * act.a2.array())).matrix();
  grads[kW2].noalias() += dz2 * act.a1.transpose();
  grads[kB2].col(0) += dz2;

  Eigen::VectorXd da1 = p_[kW2].transpose() * dz2;
  Eigen::VectorXd dz1 =
      (da1.array() * (1.0 - act.a1.array() * act.a1.array())).matrix();
  grads[kW1].noalias() += dz1 * act.x.transpose();
  grads[kB1].col(0) += dz1;
}

PolicyNet::Params PolicyNet::zero_like() const {
  Params z;
  for (int b = 0; b < kBlockCount; ++b) z[b] = Eigen::MatrixXd::Zero(p_[b].rows(), p_[b].cols());
  return z;
}

void PolicyNet::adam_step(const Params& grads, double lr) {
  ++adam_t_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam_t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam_t_));
  for (int b = 0; b < kBlockCount; ++b) {
    m_[b] = kBeta1 * m_[b] + (1.0 - kBeta1) * grads[b];
    v_[b] = (kBeta2 * v_[b].array() + (1.0 - kBeta2) * grads[b].array().square()).matrix();
    p_[b].array() -=
        lr * (m_[b].array() / c1) / ((v_[b].array() / c2).sqrt() + kAdamEps);
  }
}

Eigen::Vector2d action_probs(const Eigen::Vector2d& logits) {
  const double m = logits.maxCoeff();
  Eigen::Vector2d e = (logits.array() - m).exp();
  return e / e.sum();
}

void save_model(const std::filesystem::path& file, const PolicyNet& net) {
  std::ofstream out(file, std::ios::binary);
  require(out.good(), "cannot open model file for writing");
  out.write(kModelMagic, 8);
  const std::uint32_t header[3] = {kModelVersion, static_cast<std::uint32_t>(net.input_size()),
                                   static_cast<std::uint32_t>(net.hidden_size())};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  for (int b = 0; b < PolicyNet::kBlockCount; ++b) {
    const Eigen::MatrixXd& w = net.params()[b];
    const std::uint32_t dims[2] = {static_cast<std::uint32_t>(w.rows()),
                                   static_cast<std::uint32_t>(w.cols())};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        const double x = w(r, c);
        out.write(reinterpret_cast<const char*>(&x), sizeof x);
      }
  }
  require(out.good(), "write to model file failed");
}

PolicyNet load_model(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  require(in.good(), "cannot open model file");
  char magic[8];
  in.read(magic, 8);
  require(in.good() && std::memcmp(magic, kModelMagic, 8) == 0, "not a model file");
  std::uint32_t header[3];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  require(in.good() && header[0] == kModelVersion, "unsupported model version");
  PolicyNet net(static_cast<int>(header[1]), static_cast<int>(header[2]), 0);
  for (int b = 0; b < PolicyNet::kBlockCount; ++b) {
    std::uint32_t dims[2];
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    require(in.good(), "model file truncated");
    Eigen::MatrixXd& w = net.params()[b];
    require(static_cast<Eigen::Index>(dims[0]) == w.rows() &&
                static_cast<Eigen::Index>(dims[1]) == w.cols(),
            "model block has unexpected shape");
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        double x;
        in.read(reinterpret_cast<char*>(&x), sizeof x);
        require(in.good(), "model file truncated");
        w(r, c) = x;
      }
  }
  return net;
}

}  // namespace chainsim

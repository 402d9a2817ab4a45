#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "chainsim/errors.hpp"

namespace chainsim {

/// Dense [d0][d1][d2] tensor of float64, row-major, flat storage.
/// Demand series use (t, product, retailer); the request* tensor reuses it.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d0, int d1, int d2)
      : d0_(d0), d1_(d1), d2_(d2), v_(static_cast<size_t>(d0) * d1 * d2, 0.0) {
    require(d0 >= 0 && d1 >= 0 && d2 >= 0, "tensor dims must be nonnegative");
  }

  int d0() const { return d0_; }
  int d1() const { return d1_; }
  int d2() const { return d2_; }

  double& at(int a, int b, int c) { return v_[idx(a, b, c)]; }
  double at(int a, int b, int c) const { return v_[idx(a, b, c)]; }

  /// Contiguous innermost slice (a, b, :) as an Eigen view.
  Eigen::Map<const Eigen::ArrayXd> slice(int a, int b) const {
    return {v_.data() + idx(a, b, 0), d2_};
  }
  Eigen::Map<Eigen::ArrayXd> slice(int a, int b) {
    return {v_.data() + idx(a, b, 0), d2_};
  }

  const std::vector<double>& data() const { return v_; }
  std::vector<double>& data() { return v_; }

 private:
  size_t idx(int a, int b, int c) const {
    return (static_cast<size_t>(a) * d1_ + b) * d2_ + c;
  }
  int d0_ = 0, d1_ = 0, d2_ = 0;
  std::vector<double> v_;
};

/// Binary container: 8-byte magic, u32 version, u32 d0/d1/d2, row-major f64.
void save_tensor(const std::string& path, const Tensor3& t, const char magic[8]);
Tensor3 load_tensor(const std::string& path, const char magic[8]);

inline constexpr char kDemandMagic[8] = {'S', 'C', 'D', 'E', 'M', 'N', 'D', '1'};
inline constexpr char kRequestStarMagic[8] = {'S', 'C', 'R', 'Q', 'S', 'T', 'R', '1'};

}  // namespace chainsim

#pragma once

// Small dense network used as the DDQN value function.

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace lcarena {

/// Gradients (or moment accumulators) with the same shapes as an Mlp.
struct MlpParams {
  std::vector<Eigen::MatrixXd> weights;  // weights[l] is (out x in)
  std::vector<Eigen::VectorXd> biases;

  void set_zero();
  MlpParams& operator+=(const MlpParams& other);
  MlpParams& operator*=(double s);
  std::size_t size() const;
};

/// Rectified-linear hidden layers, identity output.
class Mlp {
 public:
  Mlp() = default;
  /// Uniform(+-sqrt(6/(fan_in+fan_out))) weights, zero biases.
  Mlp(std::vector<int> layer_sizes, std::uint64_t seed);

  const std::vector<int>& layer_sizes() const noexcept { return sizes_; }
  int input_size() const noexcept { return sizes_.front(); }
  int output_size() const noexcept { return sizes_.back(); }
  std::size_t num_layers() const noexcept { return params_.weights.size(); }

  MlpParams& params() noexcept { return params_; }
  const MlpParams& params() const noexcept { return params_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

  /// Gradient of (target - Q[index])^2 with respect to every parameter.
  /// Only output unit `index` receives error.
  MlpParams backward(const Eigen::VectorXd& input, int index, double target) const;

  /// Pre-activations of every hidden layer for `input`.
  std::vector<Eigen::VectorXd> hidden_preactivations(const Eigen::VectorXd& input) const;

  bool all_finite() const;

  friend bool operator==(const Mlp& a, const Mlp& b);

 private:
  void check_input(const Eigen::VectorXd& input) const;

  std::vector<int> sizes_;
  MlpParams params_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  MlpParams first_moment;
  MlpParams second_moment;
  long step = 0;

  static AdamState for_net(const Mlp& net, AdamConfig config = {});
};

/// Bias-corrected adaptive-moment update in place.
void adam_step(Mlp& net, const MlpParams& grads, AdamState& state);

/// Deep copy used for target-network syncs.
inline Mlp copy_params(const Mlp& src) { return src; }

nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

}  // namespace lcarena

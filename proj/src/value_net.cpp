#include "lcarena/value_net.hpp"

#include <cmath>
#include <random>

#include "lcarena/error.hpp"
#include "lcarena/rng.hpp"

namespace lcarena {

using nlohmann::json;

namespace {
constexpr const char* kCheckpointSchema = "lc-arena/mlp/1";
}

void MlpParams::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

MlpParams& MlpParams::operator+=(const MlpParams& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
  return *this;
}

MlpParams& MlpParams::operator*=(double s) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] *= s;
    biases[l] *= s;
  }
  return *this;
}

std::size_t MlpParams::size() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
  return n;
}

Mlp::Mlp(std::vector<int> layer_sizes, std::uint64_t seed) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw Error("shape_mismatch", "an MLP needs at least input and output sizes");
  for (int s : sizes_)
    if (s < 1) throw Error("shape_mismatch", "layer sizes must be positive");
  Rng rng(mix64(seed));
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Eigen::MatrixXd w(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) w(r, c) = dist(rng);
    params_.weights.push_back(std::move(w));
    params_.biases.push_back(Eigen::VectorXd::Zero(out));
  }
}

void Mlp::check_input(const Eigen::VectorXd& input) const {
  if (sizes_.empty() || input.size() != sizes_.front())
    throw Error("shape_mismatch", "input length " + std::to_string(input.size()) +
                                      " does not match layer size " +
                                      std::to_string(sizes_.empty() ? 0 : sizes_.front()));
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
  check_input(input);
  Eigen::VectorXd a = input;
  const std::size_t n = num_layers();
  for (std::size_t l = 0; l < n; ++l) {
    Eigen::VectorXd z = params_.weights[l] * a + params_.biases[l];
    a = (l + 1 < n) ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

std::vector<Eigen::VectorXd> Mlp::hidden_preactivations(const Eigen::VectorXd& input) const {
  check_input(input);
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXd a = input;
  for (std::size_t l = 0; l + 1 < num_layers(); ++l) {
    Eigen::VectorXd z = params_.weights[l] * a + params_.biases[l];
    out.push_back(z);
    a = z.cwiseMax(0.0);
  }
  return out;
}

MlpParams Mlp::backward(const Eigen::VectorXd& input, int index, double target) const {
  check_input(input);
  if (index < 0 || index >= output_size())
    throw Error("shape_mismatch", "output index " + std::to_string(index) + " out of range");
  const std::size_t n = num_layers();

  std::vector<Eigen::VectorXd> acts{input};
  std::vector<Eigen::VectorXd> pre;
  for (std::size_t l = 0; l < n; ++l) {
    Eigen::VectorXd z = params_.weights[l] * acts.back() + params_.biases[l];
    pre.push_back(z);
    acts.push_back(l + 1 < n ? Eigen::VectorXd(z.cwiseMax(0.0)) : z);
  }

  MlpParams g;
  g.weights.resize(n);
  g.biases.resize(n);
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(output_size());
  delta(index) = 2.0 * (acts.back()(index) - target);
  for (std::size_t l = n; l-- > 0;) {
    g.weights[l] = delta * acts[l].transpose();
    g.biases[l] = delta;
    if (l > 0) {
      Eigen::VectorXd back = params_.weights[l].transpose() * delta;
      const auto& z = pre[l - 1];
      for (Eigen::Index i = 0; i < back.size(); ++i)
        if (z(i) <= 0.0) back(i) = 0.0;
      delta = std::move(back);
    }
  }
  return g;
}

bool Mlp::all_finite() const {
  for (std::size_t l = 0; l < num_layers(); ++l)
    if (!params_.weights[l].allFinite() || !params_.biases[l].allFinite()) return false;
  return true;
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.sizes_ != b.sizes_) return false;
  for (std::size_t l = 0; l < a.num_layers(); ++l)
    if (a.params_.weights[l] != b.params_.weights[l] || a.params_.biases[l] != b.params_.biases[l])
      return false;
  return true;
}

AdamState AdamState::for_net(const Mlp& net, AdamConfig config) {
  AdamState s;
  s.config = config;
  s.first_moment = net.params();
  s.first_moment.set_zero();
  s.second_moment = s.first_moment;
  return s;
}

void adam_step(Mlp& net, const MlpParams& grads, AdamState& state) {
  auto& p = net.params();
  if (grads.weights.size() != p.weights.size() || state.first_moment.weights.size() != p.weights.size())
    throw Error("shape_mismatch", "gradient/optimizer state does not match the network");
  const auto& c = state.config;
  ++state.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = c.beta1 * m + (1.0 - c.beta1) * grad;
    v = c.beta2 * v + (1.0 - c.beta2) * grad.cwiseProduct(grad);
    param.array() -= c.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.epsilon);
  };
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    update(p.weights[l], grads.weights[l], state.first_moment.weights[l], state.second_moment.weights[l]);
    update(p.biases[l], grads.biases[l], state.first_moment.biases[l], state.second_moment.biases[l]);
  }
}

json to_json(const Mlp& net) {
  std::vector<double> flat;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& w = net.params().weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    const auto& b = net.params().biases[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) flat.push_back(b(i));
  }
  return {{"schema", kCheckpointSchema}, {"layer_sizes", net.layer_sizes()}, {"params", flat}};
}

Mlp mlp_from_json(const json& j) {
  if (!j.contains("schema") || j.at("schema") != kCheckpointSchema)
    throw Error("malformed_checkpoint", std::string("expected schema ") + kCheckpointSchema);
  Mlp net(j.at("layer_sizes").get<std::vector<int>>(), 0);
  const auto flat = j.at("params").get<std::vector<double>>();
  if (flat.size() != net.params().size())
    throw Error("malformed_checkpoint", "parameter count does not match layer sizes");
  std::size_t k = 0;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    auto& w = net.params().weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[k++];
    auto& b = net.params().biases[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = flat[k++];
  }
  return net;
}

}  // namespace lcarena

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rosb/rng.hpp"

namespace rosb {

class CkptWriter;
class CkptReader;

enum class OutputActivation { linear, tanh };

struct MlpGrads;

// Small dense network: ReLU hidden layers, linear or tanh output. Forward,
// exact reverse-mode gradients, nothing else.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> layer_sizes, OutputActivation out_act);

  // Hidden layers ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)); the final layer is
  // drawn in +/-3e-3 so initial policies and values start near zero.
  void init(Rng& rng);

  struct Cache {
    std::vector<Eigen::VectorXd> inputs;  // input to each layer
    std::vector<Eigen::VectorXd> preact;  // z = W x + b per layer
    Eigen::VectorXd output;
  };

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& input, Cache& cache) const;

  // Gradients of a scalar loss given dL/d(output); accumulates into `grads`
  // and returns dL/d(input).
  Eigen::VectorXd backward(const Cache& cache, const Eigen::VectorXd& upstream,
                           MlpGrads& grads) const;

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  OutputActivation output_activation() const { return out_act_; }
  std::size_t n_layers() const { return weights_.size(); }
  std::size_t n_params() const;

  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  bool same_architecture(const Mlp& other) const;

  void save(CkptWriter& w, const std::string& prefix) const;
  static Mlp load(const CkptReader& r, const std::string& prefix);

 private:
  std::vector<int> sizes_;
  OutputActivation out_act_ = OutputActivation::linear;
  std::vector<Eigen::MatrixXd> weights_;  // [l]: sizes_[l+1] x sizes_[l]
  std::vector<Eigen::VectorXd> biases_;
};

// Parameter-shaped accumulator, also used as the reduction type for batched
// gradient computation.
struct MlpGrads {
  std::vector<Eigen::MatrixXd> dw;
  std::vector<Eigen::VectorXd> db;

  static MlpGrads zeros_like(const Mlp& net);
  void add(const MlpGrads& other);
  void scale(double s);
  double max_abs() const;
  bool finite() const;
};

struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;

  static AdamState for_net(const Mlp& net, double lr);

  void save(CkptWriter& w, const std::string& prefix) const;
  static AdamState load(const CkptReader& r, const std::string& prefix);
};

// Bias-corrected Adam update in place.
void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state);

// Scalar flavour (used for the entropy temperature).
struct ScalarAdam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  double m = 0.0;
  double v = 0.0;

  void step(double& param, double grad);
};

// theta_target <- tau * theta_online + (1 - tau) * theta_target
void soft_update(Mlp& target, const Mlp& online, double tau);

}  // namespace rosb

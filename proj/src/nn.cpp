#include "rosb/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "rosb/checkpoint.hpp"

namespace rosb {

Mlp::Mlp(std::vector<int> layer_sizes, OutputActivation out_act)
    : sizes_(std::move(layer_sizes)), out_act_(out_act) {
  if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least input and output");
  for (int s : sizes_)
    if (s < 1) throw std::invalid_argument("Mlp: layer sizes must be positive");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    weights_.emplace_back(Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]));
    biases_.emplace_back(Eigen::VectorXd::Zero(sizes_[l + 1]));
  }
}

void Mlp::init(Rng& rng) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const bool final_layer = l + 1 == weights_.size();
    const double bound = final_layer ? 3e-3 : 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    Eigen::MatrixXd& w = weights_[l];
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
    Eigen::VectorXd& b = biases_[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-bound, bound);
  }
}

std::size_t Mlp::n_params() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l)
    n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  return n;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
  Cache cache;
  return forward(input, cache);
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input, Cache& cache) const {
  if (input.size() != sizes_.front())
    throw std::invalid_argument("Mlp::forward: input size mismatch");
  cache.inputs.assign(weights_.size(), {});
  cache.preact.assign(weights_.size(), {});
  Eigen::VectorXd x = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    cache.inputs[l] = x;
    Eigen::VectorXd z = weights_[l] * x + biases_[l];
    cache.preact[l] = z;
    if (l + 1 < weights_.size()) {
      x = z.cwiseMax(0.0);  // ReLU
    } else if (out_act_ == OutputActivation::tanh) {
      x = z.array().tanh().matrix();
    } else {
      x = std::move(z);
    }
  }
  cache.output = x;
  return x;
}

Eigen::VectorXd Mlp::backward(const Cache& cache, const Eigen::VectorXd& upstream,
                              MlpGrads& grads) const {
  if (upstream.size() != sizes_.back())
    throw std::invalid_argument("Mlp::backward: upstream size mismatch");
  if (grads.dw.size() != weights_.size()) grads = MlpGrads::zeros_like(*this);

  Eigen::VectorXd dz;
  if (out_act_ == OutputActivation::tanh) {
    const auto& y = cache.output.array();
    dz = (upstream.array() * (1.0 - y * y)).matrix();
  } else {
    dz = upstream;
  }
  for (std::size_t li = weights_.size(); li-- > 0;) {
    grads.dw[li].noalias() += dz * cache.inputs[li].transpose();
    grads.db[li] += dz;
    Eigen::VectorXd dx = weights_[li].transpose() * dz;
    if (li > 0) {
      // through the previous layer's ReLU
      dz = (cache.preact[li - 1].array() > 0.0).select(dx.array(), 0.0).matrix();
    } else {
      return dx;
    }
  }
  return {};
}

bool Mlp::same_architecture(const Mlp& other) const {
  return sizes_ == other.sizes_ && out_act_ == other.out_act_;
}

void Mlp::save(CkptWriter& w, const std::string& prefix) const {
  Eigen::VectorXd sz(sizes_.size());
  for (std::size_t i = 0; i < sizes_.size(); ++i) sz(i) = sizes_[i];
  w.add_vector(prefix + ".sizes", sz);
  w.add_scalar(prefix + ".out_act", out_act_ == OutputActivation::tanh ? 1.0 : 0.0);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const std::string ls = std::to_string(l);
    w.add_matrix(prefix + ".w" + ls, weights_[l]);
    w.add_vector(prefix + ".b" + ls, biases_[l]);
  }
}

Mlp Mlp::load(const CkptReader& r, const std::string& prefix) {
  const Eigen::VectorXd sz = r.vector(prefix + ".sizes");
  std::vector<int> sizes(sz.size());
  for (Eigen::Index i = 0; i < sz.size(); ++i) sizes[i] = static_cast<int>(sz(i));
  const OutputActivation act =
      r.scalar(prefix + ".out_act") != 0.0 ? OutputActivation::tanh : OutputActivation::linear;
  Mlp net(sizes, act);
  for (std::size_t l = 0; l < net.weights_.size(); ++l) {
    const std::string ls = std::to_string(l);
    const Eigen::MatrixXd& w = r.matrix(prefix + ".w" + ls);
    const Eigen::VectorXd b = r.vector(prefix + ".b" + ls);
    if (w.rows() != net.weights_[l].rows() || w.cols() != net.weights_[l].cols() ||
        b.size() != net.biases_[l].size())
      throw CorruptCheckpoint("checkpoint: layer shape mismatch in " + prefix);
    net.weights_[l] = w;
    net.biases_[l] = b;
  }
  return net;
}

MlpGrads MlpGrads::zeros_like(const Mlp& net) {
  MlpGrads g;
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    g.dw.emplace_back(Eigen::MatrixXd::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
    g.db.emplace_back(Eigen::VectorXd::Zero(net.biases()[l].size()));
  }
  return g;
}

void MlpGrads::add(const MlpGrads& other) {
  for (std::size_t l = 0; l < dw.size(); ++l) {
    dw[l] += other.dw[l];
    db[l] += other.db[l];
  }
}

void MlpGrads::scale(double s) {
  for (std::size_t l = 0; l < dw.size(); ++l) {
    dw[l] *= s;
    db[l] *= s;
  }
}

double MlpGrads::max_abs() const {
  double m = 0.0;
  for (std::size_t l = 0; l < dw.size(); ++l) {
    m = std::max(m, dw[l].cwiseAbs().maxCoeff());
    m = std::max(m, db[l].cwiseAbs().maxCoeff());
  }
  return m;
}

bool MlpGrads::finite() const {
  for (std::size_t l = 0; l < dw.size(); ++l)
    if (!dw[l].allFinite() || !db[l].allFinite()) return false;
  return true;
}

AdamState AdamState::for_net(const Mlp& net, double lr) {
  AdamState s;
  s.lr = lr;
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    s.m_w.emplace_back(Eigen::MatrixXd::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
    s.v_w.emplace_back(Eigen::MatrixXd::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
    s.m_b.emplace_back(Eigen::VectorXd::Zero(net.biases()[l].size()));
    s.v_b.emplace_back(Eigen::VectorXd::Zero(net.biases()[l].size()));
  }
  return s;
}

void AdamState::save(CkptWriter& w, const std::string& prefix) const {
  w.add_scalar(prefix + ".lr", lr);
  w.add_scalar(prefix + ".step_count", static_cast<double>(step_count));
  for (std::size_t l = 0; l < m_w.size(); ++l) {
    const std::string ls = std::to_string(l);
    w.add_matrix(prefix + ".mw" + ls, m_w[l]);
    w.add_matrix(prefix + ".vw" + ls, v_w[l]);
    w.add_vector(prefix + ".mb" + ls, m_b[l]);
    w.add_vector(prefix + ".vb" + ls, v_b[l]);
  }
}

AdamState AdamState::load(const CkptReader& r, const std::string& prefix) {
  AdamState s;
  s.lr = r.scalar(prefix + ".lr");
  s.step_count = static_cast<long>(r.scalar(prefix + ".step_count"));
  for (std::size_t l = 0;; ++l) {
    const std::string ls = std::to_string(l);
    if (!r.has_matrix(prefix + ".mw" + ls)) break;
    s.m_w.push_back(r.matrix(prefix + ".mw" + ls));
    s.v_w.push_back(r.matrix(prefix + ".vw" + ls));
    s.m_b.push_back(r.vector(prefix + ".mb" + ls));
    s.v_b.push_back(r.vector(prefix + ".vb" + ls));
  }
  return s;
}

namespace {

template <class M>
void adam_update(M& param, const M& grad, M& m, M& v, double lr, double b1, double b2,
                 double eps, double bc1, double bc2) {
  m = b1 * m + (1.0 - b1) * grad;
  v = (b2 * v.array() + (1.0 - b2) * grad.array().square()).matrix();
  param.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
}

}  // namespace

void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state) {
  if (grads.dw.size() != net.n_layers() || state.m_w.size() != net.n_layers())
    throw std::invalid_argument("adam_step: shape mismatch");
  ++state.step_count;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    adam_update(net.weights()[l], grads.dw[l], state.m_w[l], state.v_w[l], state.lr,
                state.beta1, state.beta2, state.eps, bc1, bc2);
    adam_update(net.biases()[l], grads.db[l], state.m_b[l], state.v_b[l], state.lr,
                state.beta1, state.beta2, state.eps, bc1, bc2);
  }
}

void ScalarAdam::step(double& param, double grad) {
  ++step_count;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad * grad;
  const double mhat = m / (1.0 - std::pow(beta1, static_cast<double>(step_count)));
  const double vhat = v / (1.0 - std::pow(beta2, static_cast<double>(step_count)));
  param -= lr * mhat / (std::sqrt(vhat) + eps);
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (!target.same_architecture(online))
    throw std::invalid_argument("soft_update: architecture mismatch");
  for (std::size_t l = 0; l < target.n_layers(); ++l) {
    target.weights()[l] = tau * online.weights()[l] + (1.0 - tau) * target.weights()[l];
    target.biases()[l] = tau * online.biases()[l] + (1.0 - tau) * target.biases()[l];
  }
}

}  // namespace rosb

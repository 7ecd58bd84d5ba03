#include "dbf/nn.hpp"

#include <cmath>
#include <random>

#include "dbf/errors.hpp"
#include "dbf/rng.hpp"

namespace dbf {

Mlp::Mlp(int input, const std::vector<int>& hidden, int output) {
  if (input < 1 || output < 1) throw SimulationError("mlp sizes must be positive");
  std::vector<int> sizes;
  sizes.push_back(input);
  for (int h : hidden) {
    if (h < 1) throw SimulationError("mlp sizes must be positive");
    sizes.push_back(h);
  }
  sizes.push_back(output);
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    weights_.emplace_back(Eigen::MatrixXd::Zero(sizes[k + 1], sizes[k]));
    biases_.emplace_back(Eigen::VectorXd::Zero(sizes[k + 1]));
  }
}

void Mlp::init(std::uint64_t seed, double output_scale) {
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    double bound = std::sqrt(1.0 / static_cast<double>(weights_[k].cols()));
    if (k + 1 == weights_.size()) bound *= output_scale;
    for (Eigen::Index j = 0; j < weights_[k].cols(); ++j)
      for (Eigen::Index i = 0; i < weights_[k].rows(); ++i)
        weights_[k](i, j) = bound * (2.0 * uniform01(rng) - 1.0);
    biases_[k].setZero();
  }
}

int Mlp::input_size() const { return static_cast<int>(weights_.front().cols()); }
int Mlp::output_size() const { return static_cast<int>(weights_.back().rows()); }

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  if (x.rows() != input_size())
    throw ShapeMismatchError("input has " + std::to_string(x.rows()) +
                             " rows, network expects " + std::to_string(input_size()));
  Eigen::MatrixXd a = x;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    a = (weights_[k] * a).colwise() + biases_[k];
    if (k + 1 < weights_.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache& cache) const {
  if (x.rows() != input_size())
    throw ShapeMismatchError("input has " + std::to_string(x.rows()) +
                             " rows, network expects " + std::to_string(input_size()));
  cache.input = x;
  cache.pre.clear();
  cache.post.clear();
  Eigen::MatrixXd a = x;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    Eigen::MatrixXd z = (weights_[k] * a).colwise() + biases_[k];
    cache.pre.push_back(z);
    a = (k + 1 < weights_.size()) ? z.cwiseMax(0.0).eval() : z;
    cache.post.push_back(a);
  }
  return a;
}

Mlp::Gradients Mlp::backward(const Cache& cache, const Eigen::MatrixXd& d_output) const {
  Gradients g;
  g.weights.resize(weights_.size());
  g.biases.resize(weights_.size());

  Eigen::MatrixXd delta = d_output;
  for (std::size_t k = weights_.size(); k-- > 0;) {
    const Eigen::MatrixXd& below = k == 0 ? cache.input : cache.post[k - 1];
    g.weights[k] = delta * below.transpose();
    g.biases[k] = delta.rowwise().sum();
    if (k > 0) {
      // ReLU gate: pass gradient only where the pre-activation was positive.
      delta = (weights_[k].transpose() * delta).array() *
              (cache.pre[k - 1].array() > 0.0).cast<double>();
    }
  }
  return g;
}

void AdamOptimizer::ensure_moments(const Mlp& net) {
  if (initialized_) return;
  for (std::size_t k = 0; k < net.weights().size(); ++k) {
    moments_.mw.push_back(Eigen::MatrixXd::Zero(net.weights()[k].rows(), net.weights()[k].cols()));
    moments_.vw.push_back(Eigen::MatrixXd::Zero(net.weights()[k].rows(), net.weights()[k].cols()));
    moments_.mb.push_back(Eigen::VectorXd::Zero(net.biases()[k].size()));
    moments_.vb.push_back(Eigen::VectorXd::Zero(net.biases()[k].size()));
  }
  initialized_ = true;
}

void AdamOptimizer::step(Mlp& net, const Mlp::Gradients& grads) {
  ensure_moments(net);
  ++steps_;
  double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));

  for (std::size_t k = 0; k < net.weights().size(); ++k) {
    moments_.mw[k] = config_.beta1 * moments_.mw[k] + (1.0 - config_.beta1) * grads.weights[k];
    moments_.vw[k] = config_.beta2 * moments_.vw[k] +
                     (1.0 - config_.beta2) * grads.weights[k].array().square().matrix();
    net.weights()[k].array() -=
        config_.learning_rate * (moments_.mw[k].array() / c1) /
        ((moments_.vw[k].array() / c2).sqrt() + config_.epsilon);

    moments_.mb[k] = config_.beta1 * moments_.mb[k] + (1.0 - config_.beta1) * grads.biases[k];
    moments_.vb[k] = config_.beta2 * moments_.vb[k] +
                     (1.0 - config_.beta2) * grads.biases[k].array().square().matrix();
    net.biases()[k].array() -=
        config_.learning_rate * (moments_.mb[k].array() / c1) /
        ((moments_.vb[k].array() / c2).sqrt() + config_.epsilon);
  }
}

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd shifted = logits.rowwise() - logits.colwise().maxCoeff();
  Eigen::MatrixXd e = shifted.array().exp();
  Eigen::RowVectorXd sums = e.colwise().sum();
  return e.array().rowwise() / sums.array();
}

}  // namespace dbf

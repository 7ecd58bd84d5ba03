#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace dbf {

/* Fully connected net with ReLU hidden layers and a linear output layer,
   double precision throughout. Forward passes take one column per sample so
   minibatches run as matrix products. */
class Mlp {
 public:
  struct Cache {
    Eigen::MatrixXd input;
    std::vector<Eigen::MatrixXd> pre;   // pre-activation per layer
    std::vector<Eigen::MatrixXd> post;  // post-activation per layer
  };
  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
  };

  Mlp() = default;
  Mlp(int input, const std::vector<int>& hidden, int output);

  /* Scaled uniform fan-in init; the output layer is additionally shrunk by
     output_scale (near-zero logits give a near-uniform starting policy). */
  void init(std::uint64_t seed, double output_scale = 1.0);

  int input_size() const;
  int output_size() const;
  std::size_t layer_count() const { return weights_.size(); }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache& cache) const;

  /* Backpropagates d(loss)/d(output), already carrying any batch scaling,
     and returns gradients summed over the batch columns. */
  Gradients backward(const Cache& cache, const Eigen::MatrixXd& d_output) const;

  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

 private:
  std::vector<Eigen::MatrixXd> weights_;  // layer k maps sizes[k] -> sizes[k+1]
  std::vector<Eigen::VectorXd> biases_;
};

/* Adam with the usual bias correction. Moment buffers are keyed by position,
   so one optimizer instance must stay with one parameter list. */
class AdamOptimizer {
 public:
  struct Config {
    double learning_rate = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
  };

  AdamOptimizer() = default;
  explicit AdamOptimizer(Config config) : config_(config) {}

  void step(Mlp& net, const Mlp::Gradients& grads);
  const Config& config() const noexcept { return config_; }

 private:
  struct Moments {
    std::vector<Eigen::MatrixXd> mw, vw;
    std::vector<Eigen::VectorXd> mb, vb;
  };
  void ensure_moments(const Mlp& net);

  Config config_{};
  Moments moments_;
  long steps_ = 0;
  bool initialized_ = false;
};

// Column-wise softmax, shifted by the column max for stability.
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits);

}  // namespace dbf

#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "dbf/nn.hpp"

using namespace dbf;

namespace {

// Scalar loss used for the gradient checks: weighted sum of the outputs, so
// d(loss)/d(output) is just the weight matrix.
double weighted_sum(const Eigen::MatrixXd& y, const Eigen::MatrixXd& w) {
  return (y.array() * w.array()).sum();
}

double max_relative_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < got.rows(); ++i)
    for (Eigen::Index j = 0; j < got.cols(); ++j) {
      double denom = std::max({std::abs(got(i, j)), std::abs(want(i, j)), 1e-8});
      worst = std::max(worst, std::abs(got(i, j) - want(i, j)) / denom);
    }
  return worst;
}

}  // namespace

TEST_SUITE_BEGIN("nn");

TEST_CASE("forward shapes follow the topology") {
  Mlp net(5, {8, 6}, 3);
  net.init(1);
  CHECK(net.input_size() == 5);
  CHECK(net.output_size() == 3);
  CHECK(net.layer_count() == 3);

  Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 7);
  Eigen::MatrixXd y = net.forward(x);
  CHECK(y.rows() == 3);
  CHECK(y.cols() == 7);
}

TEST_CASE("a zeroed network maps everything to zero") {
  Mlp net(4, {5}, 2);
  net.init(3);
  for (auto& w : net.weights()) w.setZero();
  for (auto& b : net.biases()) b.setZero();
  Eigen::MatrixXd y = net.forward(Eigen::MatrixXd::Random(4, 9));
  CHECK(y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hand-computed two-layer forward") {
  // One hidden ReLU unit pair, weights picked so the ReLU clips one path.
  Mlp net(2, {2}, 1);
  net.init(1);
  net.weights()[0] << 1.0, 0.0,
                      0.0, -1.0;
  net.biases()[0] << 0.0, 0.0;
  net.weights()[1] << 2.0, 3.0;
  net.biases()[1] << 0.5;

  Eigen::MatrixXd x(2, 1);
  x << 1.5, 2.0;  // pre-activations 1.5 and -2.0; ReLU keeps only the first
  Eigen::MatrixXd y = net.forward(x);
  CHECK(y(0, 0) == doctest::Approx(2.0 * 1.5 + 0.5).epsilon(1e-15));
}

TEST_CASE("column batches share no state across samples") {
  Mlp net(3, {6, 6}, 2);
  net.init(17);
  Eigen::MatrixXd batch = Eigen::MatrixXd::Random(3, 5);
  Eigen::MatrixXd all = net.forward(batch);
  for (int c = 0; c < 5; ++c) {
    Eigen::MatrixXd single = net.forward(batch.col(c));
    CHECK((all.col(c) - single.col(0)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("backward matches finite differences") {
  const double eps = 1e-6;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    Mlp net(4, {8, 8}, 3);
    net.init(seed);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 6);
    Eigen::MatrixXd sum_w = Eigen::MatrixXd::Random(3, 6);

    Mlp::Cache cache;
    net.forward(x, cache);
    Mlp::Gradients grads = net.backward(cache, sum_w);

    for (std::size_t layer = 0; layer < net.layer_count(); ++layer) {
      Eigen::MatrixXd numeric(net.weights()[layer].rows(), net.weights()[layer].cols());
      for (Eigen::Index i = 0; i < numeric.rows(); ++i)
        for (Eigen::Index j = 0; j < numeric.cols(); ++j) {
          double saved = net.weights()[layer](i, j);
          net.weights()[layer](i, j) = saved + eps;
          double up = weighted_sum(net.forward(x), sum_w);
          net.weights()[layer](i, j) = saved - eps;
          double down = weighted_sum(net.forward(x), sum_w);
          net.weights()[layer](i, j) = saved;
          numeric(i, j) = (up - down) / (2.0 * eps);
        }
      CHECK(max_relative_error(grads.weights[layer], numeric) < 1e-5);

      Eigen::VectorXd numeric_b(net.biases()[layer].size());
      for (Eigen::Index i = 0; i < numeric_b.size(); ++i) {
        double saved = net.biases()[layer](i);
        net.biases()[layer](i) = saved + eps;
        double up = weighted_sum(net.forward(x), sum_w);
        net.biases()[layer](i) = saved - eps;
        double down = weighted_sum(net.forward(x), sum_w);
        net.biases()[layer](i) = saved;
        numeric_b(i) = (up - down) / (2.0 * eps);
      }
      CHECK(max_relative_error(grads.biases[layer], numeric_b) < 1e-5);
    }
  }
}

TEST_CASE("init is deterministic per seed and spreads with it") {
  Mlp a(6, {10}, 4);
  Mlp b(6, {10}, 4);
  Mlp c(6, {10}, 4);
  a.init(42);
  b.init(42);
  c.init(43);
  CHECK((a.weights()[0] - b.weights()[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.weights()[1] - b.weights()[1]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.weights()[0] - c.weights()[0]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("output scale shrinks only the last layer") {
  Mlp plain(6, {10}, 4);
  Mlp shrunk(6, {10}, 4);
  plain.init(42, 1.0);
  shrunk.init(42, 0.01);
  CHECK((plain.weights()[0] - shrunk.weights()[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((plain.weights()[1] * 0.01 - shrunk.weights()[1]).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("adam with zero learning rate leaves parameters alone") {
  Mlp net(3, {4}, 2);
  net.init(9);
  std::vector<Eigen::MatrixXd> before_w = net.weights();

  Mlp::Cache cache;
  net.forward(Eigen::MatrixXd::Random(3, 5), cache);
  Mlp::Gradients grads = net.backward(cache, Eigen::MatrixXd::Ones(2, 5));

  AdamOptimizer opt(AdamOptimizer::Config{.learning_rate = 0.0});
  opt.step(net, grads);
  for (std::size_t k = 0; k < before_w.size(); ++k)
    CHECK((net.weights()[k] - before_w[k]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("adam first step moves by about the learning rate") {
  // With bias correction the very first update is lr * g / (|g| + eps), so
  // each touched parameter moves by nearly lr in the direction opposite g.
  Mlp net(2, {}, 1);
  net.init(5);
  net.weights()[0] << 1.0, -1.0;
  net.biases()[0] << 0.0;

  Mlp::Cache cache;
  Eigen::MatrixXd x(2, 1);
  x << 1.0, 2.0;
  net.forward(x, cache);
  Mlp::Gradients grads = net.backward(cache, Eigen::MatrixXd::Ones(1, 1));

  AdamOptimizer opt(AdamOptimizer::Config{.learning_rate = 0.01});
  opt.step(net, grads);
  CHECK(net.weights()[0](0, 0) == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
  CHECK(net.weights()[0](0, 1) == doctest::Approx(-1.0 - 0.01).epsilon(1e-6));
}

TEST_CASE("adam converges on a quadratic bowl") {
  // Minimize (w - 3)^2 for a single scalar weight.
  Mlp net(1, {}, 1);
  net.init(2);
  net.weights()[0] << 0.0;
  net.biases()[0] << 0.0;

  AdamOptimizer opt(AdamOptimizer::Config{.learning_rate = 0.05});
  for (int step = 0; step < 2000; ++step) {
    double w = net.weights()[0](0, 0);
    Mlp::Gradients grads;
    grads.weights.push_back(Eigen::MatrixXd::Constant(1, 1, 2.0 * (w - 3.0)));
    grads.biases.push_back(Eigen::VectorXd::Zero(1));
    opt.step(net, grads);
  }
  CHECK(net.weights()[0](0, 0) == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("softmax columns are normalized and order-preserving") {
  Eigen::MatrixXd logits(3, 2);
  logits << 1.0, 1000.0,
            2.0, 1000.0,
            3.0, 1000.0;
  Eigen::MatrixXd p = softmax_columns(logits);

  for (int c = 0; c < 2; ++c)
    CHECK(p.col(c).sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p(0, 0) < p(1, 0));
  CHECK(p(1, 0) < p(2, 0));
  // Large equal logits must not overflow; they are a uniform column.
  for (int r = 0; r < 3; ++r)
    CHECK(p(r, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("softmax of zero logits is uniform") {
  Eigen::MatrixXd p = softmax_columns(Eigen::MatrixXd::Zero(4, 3));
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 4; ++r)
      CHECK(p(r, c) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_SUITE_END();

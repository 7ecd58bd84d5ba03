#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dbf/nn.hpp"

namespace dbf {

/* Actor-critic pair over the flattened observation. The actor emits one
   logit per window slot plus one for Fwd; the critic a single value. */
struct PolicyParams {
  Mlp actor;
  Mlp critic;

  int input_size() const { return actor.input_size(); }
  int action_count() const { return actor.output_size(); }
};

PolicyParams make_policy(int observation_size, int action_count,
                         const std::vector<int>& hidden, std::uint64_t seed);

struct PpoHyperparams {
  double learning_rate = 3e-4;
  double clip = 0.2;
  double gamma = 0.99;
  int minibatch = 128;
  int epochs = 4;
  double entropy_coef = 0.0;
  double value_coef = 0.5;
  bool use_gae = false;       // default: plain discounted returns
  double gae_lambda = 0.95;
};

/* One on-policy episode of transitions. done is recorded per step; a buffer
   handed to update() must close with its single terminal step. */
struct RolloutBuffer {
  std::vector<std::vector<double>> observations;
  std::vector<int> actions;
  std::vector<double> log_probs;  // log pi(a|s) at collection time
  std::vector<double> rewards;
  std::vector<double> values;     // critic estimates at collection time
  std::vector<bool> dones;

  std::size_t size() const { return actions.size(); }
  void clear();
  void push(std::vector<double> obs, int action, double log_prob, double reward,
            double value, bool done);
};

// Action distribution for one observation; dimension-checked softmax.
std::vector<double> policy_forward(const PolicyParams& params, std::span<const double> obs);
double value_forward(const PolicyParams& params, std::span<const double> obs);

int greedy_action(std::span<const double> probs);

// G_t = r_t + gamma * G_{t+1}, swept right to left.
std::vector<double> discounted_returns(std::span<const double> rewards, double gamma);

/* Clipped-surrogate loss with value and entropy terms over one minibatch:
     mean( -min(rho * A, clip(rho, 1-eps, 1+eps) * A) )
     + value_coef * mean((V - G)^2) - entropy_coef * mean(H)
   Returns the loss and its exact parameter gradients. Advantages are taken
   as given (they are constants of the update). Throws NonFiniteLossError if
   the loss or any gradient fails to be finite. */
struct PpoBatch {
  Eigen::MatrixXd observations;       // one column per sample
  std::vector<int> actions;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd returns;
  Eigen::VectorXd advantages;
};

struct PpoStep {
  double loss = 0.0;
  Mlp::Gradients actor_grads;
  Mlp::Gradients critic_grads;
};

PpoStep ppo_objective(const PolicyParams& params, const PpoBatch& batch,
                      const PpoHyperparams& hp);

/* One PPO update over a finished episode: computes returns and advantages
   (A = G - V, normalized across the whole buffer), then runs the configured
   epochs of shuffled minibatches through Adam. On a non-finite loss the
   parameters are restored to their pre-update state before rethrowing. */
void ppo_update(PolicyParams& params, AdamOptimizer& actor_opt, AdamOptimizer& critic_opt,
                const RolloutBuffer& buffer, const PpoHyperparams& hp,
                std::mt19937_64& shuffle_rng);

/* Plain-text checkpoints: a "DBF-CKPT 1" header line, then one record per
   tensor (name, rank, dimensions, row-major values). Values are printed
   with enough digits to round-trip doubles exactly. */
void save_checkpoint(const std::string& path, const PolicyParams& params);
PolicyParams load_checkpoint(const std::string& path);

// Guards a loaded policy against an environment with different dimensions.
void check_policy_shape(const PolicyParams& params, int observation_size, int action_count);

}  // namespace dbf

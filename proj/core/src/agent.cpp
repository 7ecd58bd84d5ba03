#include "dbf/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "dbf/errors.hpp"
#include "dbf/rng.hpp"

namespace dbf {

namespace {

constexpr const char* kCheckpointMagic = "DBF-CKPT";
constexpr int kCheckpointVersion = 1;
// Keeps the freshly initialized policy close to uniform.
constexpr double kActorOutputScale = 0.01;

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> obs) {
  return {obs.data(), static_cast<Eigen::Index>(obs.size())};
}

bool all_finite(const Mlp::Gradients& g) {
  for (const auto& w : g.weights)
    if (!w.allFinite()) return false;
  for (const auto& b : g.biases)
    if (!b.allFinite()) return false;
  return true;
}

}  // namespace

PolicyParams make_policy(int observation_size, int action_count,
                         const std::vector<int>& hidden, std::uint64_t seed) {
  PolicyParams p;
  p.actor = Mlp(observation_size, hidden, action_count);
  p.actor.init(derive_seed(seed, 1), kActorOutputScale);
  p.critic = Mlp(observation_size, hidden, 1);
  p.critic.init(derive_seed(seed, 2));
  return p;
}

void RolloutBuffer::clear() {
  observations.clear();
  actions.clear();
  log_probs.clear();
  rewards.clear();
  values.clear();
  dones.clear();
}

void RolloutBuffer::push(std::vector<double> obs, int action, double log_prob,
                         double reward, double value, bool done) {
  observations.push_back(std::move(obs));
  actions.push_back(action);
  log_probs.push_back(log_prob);
  rewards.push_back(reward);
  values.push_back(value);
  dones.push_back(done);
}

std::vector<double> policy_forward(const PolicyParams& params, std::span<const double> obs) {
  if (static_cast<int>(obs.size()) != params.input_size())
    throw ShapeMismatchError("observation size " + std::to_string(obs.size()) +
                             " does not match policy input " +
                             std::to_string(params.input_size()));
  Eigen::MatrixXd logits = params.actor.forward(as_vector(obs));
  Eigen::MatrixXd probs = softmax_columns(logits);
  return {probs.data(), probs.data() + probs.rows()};
}

double value_forward(const PolicyParams& params, std::span<const double> obs) {
  if (static_cast<int>(obs.size()) != params.input_size())
    throw ShapeMismatchError("observation size " + std::to_string(obs.size()) +
                             " does not match critic input " +
                             std::to_string(params.input_size()));
  return params.critic.forward(as_vector(obs))(0, 0);
}

int greedy_action(std::span<const double> probs) {
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
  std::vector<double> returns(rewards.size());
  double g = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    g = rewards[i] + gamma * g;
    returns[i] = g;
  }
  return returns;
}

PpoStep ppo_objective(const PolicyParams& params, const PpoBatch& batch,
                      const PpoHyperparams& hp) {
  const Eigen::Index n = batch.observations.cols();
  if (n == 0) throw SimulationError("empty ppo batch");
  const double inv_n = 1.0 / static_cast<double>(n);

  Mlp::Cache actor_cache, critic_cache;
  Eigen::MatrixXd logits = params.actor.forward(batch.observations, actor_cache);
  Eigen::MatrixXd probs = softmax_columns(logits);
  Eigen::MatrixXd values = params.critic.forward(batch.observations, critic_cache);

  PpoStep step;
  Eigen::MatrixXd d_logits = Eigen::MatrixXd::Zero(logits.rows(), n);
  Eigen::MatrixXd d_values = Eigen::MatrixXd::Zero(1, n);

  double surrogate = 0.0, value_loss = 0.0, entropy = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int a = batch.actions[static_cast<std::size_t>(i)];
    const double adv = batch.advantages(i);
    const double log_p = std::log(std::max(probs(a, i), 1e-300));
    const double rho = std::exp(log_p - batch.old_log_probs(i));

    // Clipped surrogate. Where the clipped branch is active the ratio has
    // no gradient, so the sample contributes nothing to d_logits.
    const double lo = 1.0 - hp.clip, hi = 1.0 + hp.clip;
    const double unclipped = rho * adv;
    const double clipped = std::clamp(rho, lo, hi) * adv;
    surrogate += std::min(unclipped, clipped);
    const bool ratio_active = unclipped <= clipped;
    if (ratio_active) {
      // d(rho * adv)/d(logit_j) = rho * adv * (1{j=a} - p_j); loss is the
      // negated mean.
      for (Eigen::Index j = 0; j < logits.rows(); ++j) {
        double indicator = j == a ? 1.0 : 0.0;
        d_logits(j, i) += -inv_n * rho * adv * (indicator - probs(j, i));
      }
    }

    // Entropy bonus: dH/d(logit_j) = -p_j * (log p_j + H).
    double h = 0.0;
    for (Eigen::Index j = 0; j < logits.rows(); ++j) {
      double p = probs(j, i);
      if (p > 0.0) h -= p * std::log(p);
    }
    entropy += h;
    if (hp.entropy_coef != 0.0) {
      for (Eigen::Index j = 0; j < logits.rows(); ++j) {
        double p = probs(j, i);
        double log_pj = std::log(std::max(p, 1e-300));
        d_logits(j, i) += -hp.entropy_coef * inv_n * (-p * (log_pj + h));
      }
    }

    const double diff = values(0, i) - batch.returns(i);
    value_loss += diff * diff;
    d_values(0, i) = hp.value_coef * inv_n * 2.0 * diff;
  }

  step.loss = -surrogate * inv_n + hp.value_coef * value_loss * inv_n -
              hp.entropy_coef * entropy * inv_n;
  step.actor_grads = params.actor.backward(actor_cache, d_logits);
  step.critic_grads = params.critic.backward(critic_cache, d_values);

  if (!std::isfinite(step.loss) || !all_finite(step.actor_grads) ||
      !all_finite(step.critic_grads))
    throw NonFiniteLossError("ppo loss or gradients are not finite");
  return step;
}

void ppo_update(PolicyParams& params, AdamOptimizer& actor_opt, AdamOptimizer& critic_opt,
                const RolloutBuffer& buffer, const PpoHyperparams& hp,
                std::mt19937_64& shuffle_rng) {
  const std::size_t n = buffer.size();
  if (n == 0) throw SimulationError("ppo update over an empty buffer");
  for (std::size_t i = 0; i < n; ++i)
    if (buffer.dones[i] != (i + 1 == n))
      throw SimulationError("rollout must end with its single terminal step");

  Eigen::MatrixXd obs(buffer.observations.front().size(), n);
  for (std::size_t i = 0; i < n; ++i)
    obs.col(static_cast<Eigen::Index>(i)) = as_vector(buffer.observations[i]);

  std::vector<double> g = discounted_returns(buffer.rewards, hp.gamma);
  Eigen::VectorXd returns = Eigen::Map<Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(n));

  Eigen::VectorXd advantages(static_cast<Eigen::Index>(n));
  if (hp.use_gae) {
    // Generalized advantage estimation over the single episode; the value
    // after the terminal step is 0.
    double acc = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      double next_v = i + 1 < n ? buffer.values[i + 1] : 0.0;
      double delta = buffer.rewards[i] + hp.gamma * next_v - buffer.values[i];
      acc = delta + hp.gamma * hp.gae_lambda * acc;
      advantages(static_cast<Eigen::Index>(i)) = acc;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      advantages(static_cast<Eigen::Index>(i)) = returns(static_cast<Eigen::Index>(i)) -
                                                 buffer.values[i];
  }
  if (n > 1) {
    double mean = advantages.mean();
    double var = (advantages.array() - mean).square().sum() / static_cast<double>(n);
    advantages = (advantages.array() - mean) / (std::sqrt(var) + 1e-8);
  }

  // Snapshot so a non-finite loss can roll everything back.
  PolicyParams before = params;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  try {
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
      // Fisher-Yates on our own rng stream, for cross-platform determinism.
      for (std::size_t i = n; i-- > 1;) {
        std::size_t j = static_cast<std::size_t>(uniform_below(shuffle_rng, i + 1));
        std::swap(order[i], order[j]);
      }
      const std::size_t mb = std::max<std::size_t>(1, static_cast<std::size_t>(hp.minibatch));
      for (std::size_t lo = 0; lo < n; lo += mb) {
        const std::size_t hi = std::min(n, lo + mb);
        PpoBatch batch;
        batch.observations.resize(obs.rows(), static_cast<Eigen::Index>(hi - lo));
        batch.old_log_probs.resize(static_cast<Eigen::Index>(hi - lo));
        batch.returns.resize(static_cast<Eigen::Index>(hi - lo));
        batch.advantages.resize(static_cast<Eigen::Index>(hi - lo));
        for (std::size_t i = lo; i < hi; ++i) {
          const std::size_t src = order[i];
          const Eigen::Index dst = static_cast<Eigen::Index>(i - lo);
          batch.observations.col(dst) = obs.col(static_cast<Eigen::Index>(src));
          batch.actions.push_back(buffer.actions[src]);
          batch.old_log_probs(dst) = buffer.log_probs[src];
          batch.returns(dst) = returns(static_cast<Eigen::Index>(src));
          batch.advantages(dst) = advantages(static_cast<Eigen::Index>(src));
        }
        PpoStep step = ppo_objective(params, batch, hp);
        actor_opt.step(params.actor, step.actor_grads);
        critic_opt.step(params.critic, step.critic_grads);
      }
    }
  } catch (const NonFiniteLossError&) {
    params = before;
    throw;
  }
}

namespace {

void write_tensor(std::FILE* f, const std::string& name, const Eigen::MatrixXd& m,
                  bool is_vector) {
  if (is_vector)
    std::fprintf(f, "%s 1 %ld\n", name.c_str(), static_cast<long>(m.rows()));
  else
    std::fprintf(f, "%s 2 %ld %ld\n", name.c_str(), static_cast<long>(m.rows()),
                 static_cast<long>(m.cols()));
  // Row-major so the text layout matches the printed dimensions.
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      std::fprintf(f, "%.17g%c", m(i, j), (j + 1 == m.cols()) ? '\n' : ' ');
}

struct RawTensor {
  std::vector<long> dims;
  std::vector<double> values;
};

}  // namespace

void save_checkpoint(const std::string& path, const PolicyParams& params) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw CheckpointError("cannot write checkpoint: " + path);
  std::fprintf(f, "%s %d\n", kCheckpointMagic, kCheckpointVersion);
  auto dump = [&](const char* net, const Mlp& mlp) {
    for (std::size_t k = 0; k < mlp.layer_count(); ++k) {
      std::string base = std::string(net) + "." + std::to_string(k);
      write_tensor(f, base + ".weight", mlp.weights()[k], false);
      write_tensor(f, base + ".bias", mlp.biases()[k], true);
    }
  };
  dump("actor", params.actor);
  dump("critic", params.critic);
  std::fclose(f);
}

PolicyParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot read checkpoint: " + path);

  std::string magic;
  int version = 0;
  if (!(in >> magic) || magic != kCheckpointMagic)
    throw MalformedCheckpointError("missing DBF-CKPT header");
  if (!(in >> version)) throw MalformedCheckpointError("missing format version");
  if (version != kCheckpointVersion)
    throw CheckpointVersionError("unsupported checkpoint version " + std::to_string(version));

  std::map<std::string, RawTensor> tensors;
  std::string name;
  while (in >> name) {
    int rank;
    if (!(in >> rank) || rank < 1 || rank > 2)
      throw MalformedCheckpointError("bad rank for tensor " + name);
    RawTensor t;
    long total = 1;
    for (int d = 0; d < rank; ++d) {
      long dim;
      if (!(in >> dim) || dim < 1) throw MalformedCheckpointError("bad dimension for " + name);
      t.dims.push_back(dim);
      total *= dim;
    }
    t.values.resize(static_cast<std::size_t>(total));
    for (long i = 0; i < total; ++i)
      if (!(in >> t.values[static_cast<std::size_t>(i)]))
        throw MalformedCheckpointError("truncated values for " + name);
    if (!tensors.emplace(name, std::move(t)).second)
      throw MalformedCheckpointError("duplicate tensor " + name);
  }

  // Rebuild each net from its numbered weight/bias pairs.
  auto rebuild = [&](const std::string& net) {
    std::vector<const RawTensor*> ws, bs;
    for (std::size_t k = 0;; ++k) {
      auto w = tensors.find(net + "." + std::to_string(k) + ".weight");
      auto b = tensors.find(net + "." + std::to_string(k) + ".bias");
      if (w == tensors.end() && b == tensors.end()) break;
      if (w == tensors.end() || b == tensors.end())
        throw MalformedCheckpointError(net + " layer " + std::to_string(k) + " incomplete");
      if (w->second.dims.size() != 2 || b->second.dims.size() != 1 ||
          w->second.dims[0] != b->second.dims[0])
        throw MalformedCheckpointError(net + " layer " + std::to_string(k) +
                                       " has inconsistent shapes");
      ws.push_back(&w->second);
      bs.push_back(&b->second);
    }
    if (ws.empty()) throw MalformedCheckpointError("checkpoint lacks " + net + " tensors");
    std::vector<int> hidden;
    for (std::size_t k = 0; k + 1 < ws.size(); ++k) {
      hidden.push_back(static_cast<int>(ws[k]->dims[0]));
      if (ws[k + 1]->dims[1] != ws[k]->dims[0])
        throw MalformedCheckpointError(net + " layer sizes do not chain");
    }
    Mlp mlp(static_cast<int>(ws.front()->dims[1]), hidden,
            static_cast<int>(ws.back()->dims[0]));
    for (std::size_t k = 0; k < ws.size(); ++k) {
      Eigen::MatrixXd& w = mlp.weights()[k];
      for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j)
          w(i, j) = ws[k]->values[static_cast<std::size_t>(i * w.cols() + j)];
      Eigen::VectorXd& b = mlp.biases()[k];
      for (Eigen::Index i = 0; i < b.size(); ++i)
        b(i) = bs[k]->values[static_cast<std::size_t>(i)];
    }
    return mlp;
  };

  PolicyParams params;
  params.actor = rebuild("actor");
  params.critic = rebuild("critic");
  std::size_t expected = 2 * (params.actor.layer_count() + params.critic.layer_count());
  if (tensors.size() != expected)
    throw MalformedCheckpointError("checkpoint holds unexpected tensors");
  if (params.critic.output_size() != 1)
    throw MalformedCheckpointError("critic must output a single value");
  if (params.critic.input_size() != params.actor.input_size())
    throw MalformedCheckpointError("actor and critic input sizes differ");
  return params;
}

void check_policy_shape(const PolicyParams& params, int observation_size, int action_count) {
  if (params.input_size() != observation_size || params.action_count() != action_count)
    throw ShapeMismatchError(
        "policy is sized " + std::to_string(params.input_size()) + "x" +
        std::to_string(params.action_count()) + ", environment needs " +
        std::to_string(observation_size) + "x" + std::to_string(action_count));
}

}  // namespace dbf

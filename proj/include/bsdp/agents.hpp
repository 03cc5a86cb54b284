#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bsdp/diverse_prior.hpp"
#include "bsdp/ensemble.hpp"
#include "bsdp/envs/env.hpp"
#include "bsdp/optimizer.hpp"
#include "bsdp/replay.hpp"
#include "bsdp/rng.hpp"

namespace bsdp {

enum class AgentKind { Bsdp, Bsp, Bs, EpsGreedyDqn, RandomPolicy };

inline AgentKind agent_kind_from_name(const std::string& name) {
  if (name == "bsdp") return AgentKind::Bsdp;
  if (name == "bsp") return AgentKind::Bsp;
  if (name == "bs") return AgentKind::Bs;
  if (name == "dqn") return AgentKind::EpsGreedyDqn;
  if (name == "random") return AgentKind::RandomPolicy;
  throw std::invalid_argument("unknown algorithm: " + name);
}

inline std::string agent_kind_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::Bsdp: return "bsdp";
    case AgentKind::Bsp: return "bsp";
    case AgentKind::Bs: return "bs";
    case AgentKind::EpsGreedyDqn: return "dqn";
    case AgentKind::RandomPolicy: return "random";
  }
  return "?";
}

struct AgentConfig {
  AgentKind kind = AgentKind::Bsdp;
  int ensemble_size = 5;
  std::vector<int> hidden_layers = {64, 64};
  OptimizerKind optimizer = OptimizerKind::Adam;
  double learning_rate = 1e-4;
  double prior_learning_rate = 1e-4;
  double gamma = 0.99;
  bool per_step_resampling = false;
  int target_sync = 100;   // environment steps between hard target copies
  int warmup = 500;        // stored transitions before updates begin
  int batch_size = 64;
  double mask_probability = 0.5;
  // Decaying epsilon-greedy schedule (DQN only).
  double beta1 = 0.05;
  double beta2 = 0.9;
  double lambda = 1000.0;
  DiversityHyperparams diversity;
};

/// Lowest index wins ties, so greedy trajectories are reproducible.
inline int argmax_action(const Vec& q) {
  if (q.empty()) throw std::invalid_argument("argmax_action: empty Q vector");
  int best = 0;
  for (int a = 1; a < static_cast<int>(q.size()); ++a)
    if (q[a] > q[best]) best = a;
  return best;
}

inline int select_member(int k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("select_member: K < 1");
  std::uniform_int_distribution<int> dist(0, k - 1);
  return dist(rng);
}

/// epsilon(k) = beta1 + (beta2 - beta1) * exp(-k / lambda): starts at beta2,
/// decays towards beta1.
inline double epsilon_schedule(std::int64_t step, double beta1, double beta2,
                               double lambda) {
  return beta1 + (beta2 - beta1) * std::exp(-static_cast<double>(step) / lambda);
}

/// Mean squared TD error over the batch plus its gradient with respect to the
/// member's trainable parameters. The bootstrap target uses the target copy
/// of the trainable network plus the same fixed prior; terminal transitions
/// reduce the target to the reward alone.
inline std::pair<double, GradientSet> td_loss(
    const QEnsembleMember& member, const std::vector<MaskedTransition>& batch,
    double gamma) {
  if (batch.empty()) throw std::invalid_argument("td_loss: empty batch");
  GradientSet grads = member.trainable.zero_gradients();
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  Vec out_grad;
  for (const MaskedTransition& t : batch) {
    const Vec q = member.q(t.state);
    double target = t.reward;
    if (!t.terminal) {
      const Vec tq = member.target_q(t.next_state);
      target += gamma * tq[argmax_action(tq)];
    }
    const double delta = q[t.action] - target;
    loss += delta * delta * inv_n;
    out_grad.assign(q.size(), 0.0);
    out_grad[t.action] = 2.0 * delta * inv_n;
    grads.add(member.trainable.backward(t.state, out_grad));
  }
  return {loss, grads};
}

struct EpisodeRecord {
  double total_reward = 0.0;
  int steps = 0;
  // One flag per step: the chosen action differed from the greedy action of
  // the ensemble's mean Q.
  std::vector<std::uint8_t> exploration_flags;
};

/// Hook for instrumented runs; default callbacks are no-ops.
struct TrainObserver {
  virtual ~TrainObserver() = default;
  virtual void on_push(std::uint64_t, const MaskedTransition&) {}
  virtual void on_member_update(int, std::span<const std::uint64_t>) {}
};

class Agent {
 public:
  /// Builds the agent's networks from `seed`. Trainable networks are drawn
  /// from one random stream and priors from another, so variants that differ
  /// only in their priors share identical trainable initialization.
  static Agent make(const AgentConfig& cfg, const EnvSpec& env_spec,
                    std::uint64_t seed) {
    Agent agent;
    agent.cfg_ = cfg;
    if (cfg.kind == AgentKind::RandomPolicy) return agent;

    const int k = cfg.kind == AgentKind::EpsGreedyDqn ? 1 : cfg.ensemble_size;
    if (k < 1) throw std::invalid_argument("Agent::make: ensemble size < 1");
    std::vector<int> sizes;
    sizes.push_back(env_spec.state_dim);
    for (int h : cfg.hidden_layers) sizes.push_back(h);
    sizes.push_back(env_spec.action_count);

    Rng net_rng = make_rng(seed, stream::kTrainableInit);
    Rng prior_rng = make_rng(seed, stream::kPriorInit);
    const bool random_priors =
        cfg.kind == AgentKind::Bsp || cfg.kind == AgentKind::Bsdp;

    agent.members_.reserve(k);
    for (int i = 0; i < k; ++i) {
      QEnsembleMember member;
      member.trainable = MLP::init_he(sizes, Activation::ReLU, net_rng);
      member.target_trainable = member.trainable;
      if (random_priors) {
        // Tanh hidden units keep the priors' second derivatives nonzero,
        // which the nonlinearity loss needs to optimize anything.
        member.prior = MLP::init_he(sizes, Activation::Tanh, prior_rng);
      } else {
        member.prior = MLP(sizes, Activation::Tanh);
        member.prior_is_zero = true;
      }
      agent.members_.push_back(std::move(member));
    }

    if (cfg.kind == AgentKind::Bsdp) {
      StateSampler sampler(env_spec.sampling_box);
      Optimizer prior_opt(cfg.optimizer, cfg.prior_learning_rate);
      diverse_prior_init(agent.members_, sampler, cfg.diversity, prior_opt,
                         prior_rng);
    } else {
      for (auto& m : agent.members_) m.prior_frozen = true;
    }

    agent.optimizers_.assign(agent.members_.size(),
                             Optimizer(cfg.optimizer, cfg.learning_rate));
    return agent;
  }

  const AgentConfig& config() const { return cfg_; }
  AgentKind kind() const { return cfg_.kind; }
  bool is_ensemble() const {
    return cfg_.kind == AgentKind::Bs || cfg_.kind == AgentKind::Bsp ||
           cfg_.kind == AgentKind::Bsdp;
  }
  int ensemble_size() const { return static_cast<int>(members_.size()); }
  Ensemble& members() { return members_; }
  const Ensemble& members() const { return members_; }
  std::int64_t global_step() const { return global_step_; }

  Vec member_q(int member, const Vec& state) const {
    return members_.at(member).q(state);
  }

  int act_thompson(const Vec& state, int active_member) const {
    return argmax_action(member_q(active_member, state));
  }

  double epsilon_at(std::int64_t step) const {
    return epsilon_schedule(step, cfg_.beta1, cfg_.beta2, cfg_.lambda);
  }

  int act_eps_greedy(const Vec& state, std::int64_t step, Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < epsilon_at(step)) {
      std::uniform_int_distribution<int> dist(
          0, static_cast<int>(member_q(0, state).size()) - 1);
      return dist(rng);
    }
    return argmax_action(member_q(0, state));
  }

  /// Greedy action of the mean Q over all members; the pure-exploitation
  /// reference against which exploration is measured.
  int greedy_action(const Vec& state) const {
    Vec mean = member_q(0, state);
    for (std::size_t k = 1; k < members_.size(); ++k) {
      const Vec q = member_q(static_cast<int>(k), state);
      for (std::size_t a = 0; a < mean.size(); ++a) mean[a] += q[a];
    }
    for (double& v : mean) v /= static_cast<double>(members_.size());
    return argmax_action(mean);
  }

  /// One episode of interaction and (past warmup) per-step member updates on
  /// mask-filtered mini-batches.
  EpisodeRecord train_episode(Environment& env, ReplayBuffer& buffer, Rng& rng,
                              TrainObserver* observer = nullptr) {
    EpisodeRecord rec;
    Vec state = env.reset(rng);
    const int actions = env.spec().action_count;
    int active = 0;
    if (is_ensemble() && !cfg_.per_step_resampling)
      active = select_member(ensemble_size(), rng);

    bool done = false;
    while (!done) {
      int action;
      bool explored;
      if (cfg_.kind == AgentKind::RandomPolicy) {
        std::uniform_int_distribution<int> dist(0, actions - 1);
        action = dist(rng);
        explored = true;
      } else if (cfg_.kind == AgentKind::EpsGreedyDqn) {
        action = act_eps_greedy(state, global_step_, rng);
        explored = action != greedy_action(state);
      } else {
        if (cfg_.per_step_resampling)
          active = select_member(ensemble_size(), rng);
        action = act_thompson(state, active);
        explored = action != greedy_action(state);
      }

      StepResult sr = env.step(action);
      if (cfg_.kind != AgentKind::RandomPolicy) {
        MaskedTransition t{state,         action,      sr.reward,
                           sr.next_state, sr.terminal, {}};
        t.mask = is_ensemble()
                     ? sample_mask(ensemble_size(), cfg_.mask_probability, rng)
                     : std::vector<std::uint8_t>{1};
        const std::uint64_t id = buffer.push(std::move(t));
        if (observer) observer->on_push(id, buffer.at(buffer.size() - 1));

        if (buffer.size() >= static_cast<std::size_t>(cfg_.warmup)) {
          for (int k = 0; k < ensemble_size(); ++k) {
            auto batch = buffer.sample_for_member(k, cfg_.batch_size, rng);
            if (!batch) continue;
            auto [loss, grads] = td_loss(members_[k], batch->transitions,
                                         cfg_.gamma);
            (void)loss;
            optimizers_[k].step(members_[k].trainable, grads);
            if (observer) observer->on_member_update(k, batch->ids);
          }
        }
        ++global_step_;
        if (global_step_ % cfg_.target_sync == 0)
          for (auto& m : members_) m.sync_target();
      }

      rec.total_reward += sr.reward;
      rec.steps += 1;
      rec.exploration_flags.push_back(explored ? 1 : 0);
      done = sr.terminal || sr.truncated;
      state = std::move(sr.next_state);
    }
    return rec;
  }

  /// Clears every prior to the zero function (test hook for comparing against
  /// the no-prior variant).
  void zero_priors() {
    for (auto& m : members_) {
      m.prior.set_all_parameters(0.0);
      m.prior_is_zero = true;
    }
  }

 private:
  AgentConfig cfg_;
  Ensemble members_;
  std::vector<Optimizer> optimizers_;
  std::int64_t global_step_ = 0;
};

}  // namespace bsdp

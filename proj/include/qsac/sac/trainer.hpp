// Copyright 2026 The QuantumSAC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Soft Actor-Critic trainer: twin critics, Polyak-averaged targets, squashed
 * Gaussian actor (classical or quantum backend), optional automatic entropy
 * temperature.  Single logical sequence: collect -> store -> update.
 */
#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qsac/envs/env.hpp"
#include "qsac/nn/adam.hpp"
#include "qsac/nn/dense_net.hpp"
#include "qsac/pqc/policy.hpp"
#include "qsac/sac/policy_backend.hpp"
#include "qsac/sac/replay_buffer.hpp"

namespace qsac::sac {

struct SacHyperparams {
    double gamma = 0.99;
    double tau = 0.005;
    double alpha = 0.2;          // fixed value when auto_alpha is off
    bool auto_alpha = true;      // target_entropy = -act_dim
    std::size_t batch_size = 256;
    double lr_actor = 3e-4;
    double lr_critic = 3e-4;
    double lr_alpha = 3e-4;
    std::size_t start_steps = 1000;
    std::size_t update_every = 1;
    std::size_t capacity = 100000;

    void validate() const {
        if (gamma < 0.0 || gamma >= 1.0) {
            throw ConfigError("gamma must be in [0, 1)");
        }
        if (tau <= 0.0 || tau > 1.0) {
            throw ConfigError("tau must be in (0, 1]");
        }
        if (alpha < 0.0) {
            throw ConfigError("alpha must be >= 0");
        }
        if (batch_size == 0 || update_every == 0 || capacity == 0) {
            throw ConfigError("batch_size, update_every, capacity must be positive");
        }
    }
};

inline void to_json(nlohmann::json &j, const SacHyperparams &h) {
    j = {{"gamma", h.gamma}, {"tau", h.tau}, {"alpha", h.alpha},
         {"auto_alpha", h.auto_alpha}, {"batch_size", h.batch_size},
         {"lr_actor", h.lr_actor}, {"lr_critic", h.lr_critic},
         {"lr_alpha", h.lr_alpha}, {"start_steps", h.start_steps},
         {"update_every", h.update_every}, {"capacity", h.capacity}};
}

inline void from_json(const nlohmann::json &j, SacHyperparams &h) {
    j.at("gamma").get_to(h.gamma);
    j.at("tau").get_to(h.tau);
    j.at("alpha").get_to(h.alpha);
    j.at("auto_alpha").get_to(h.auto_alpha);
    j.at("batch_size").get_to(h.batch_size);
    j.at("lr_actor").get_to(h.lr_actor);
    j.at("lr_critic").get_to(h.lr_critic);
    j.at("lr_alpha").get_to(h.lr_alpha);
    j.at("start_steps").get_to(h.start_steps);
    j.at("update_every").get_to(h.update_every);
    j.at("capacity").get_to(h.capacity);
}

/// target <- tau * online + (1 - tau) * target, elementwise.
inline void polyak_update(nn::DenseNet &target, const nn::DenseNet &online,
                          double tau) {
    if (target.layer_sizes() != online.layer_sizes()) {
        throw StructuralError("polyak shape mismatch");
    }
    for (std::size_t li = 0; li < target.layers().size(); ++li) {
        auto &tl = target.layers()[li];
        const auto &ol = online.layers()[li];
        for (std::size_t i = 0; i < tl.w.size(); ++i) {
            tl.w[i] = tau * ol.w[i] + (1.0 - tau) * tl.w[i];
        }
        for (std::size_t i = 0; i < tl.b.size(); ++i) {
            tl.b[i] = tau * ol.b[i] + (1.0 - tau) * tl.b[i];
        }
    }
}

/// y = r + gamma * (1 - done) * (min_q - alpha * log_pi)
inline double bootstrap_target(double reward, bool done, double gamma,
                               double min_q, double alpha, double log_pi) {
    if (done) {
        return reward;
    }
    return reward + gamma * (min_q - alpha * log_pi);
}

struct StepInfo {
    std::size_t total_env_steps = 0;
    bool episode_done = false;       // terminated or truncated
    double episode_return = 0.0;     // valid when episode_done
    std::size_t episode_length = 0;  // valid when episode_done
    bool updated = false;
    double critic_loss_1 = 0.0;
    double critic_loss_2 = 0.0;
    double policy_loss = 0.0;
    double alpha = 0.0;
};

class SacTrainer {
  public:
    SacTrainer(envs::Env &env, std::unique_ptr<PolicyBackend> policy,
               SacHyperparams hp, std::uint64_t seed)
        : env_(env), policy_(std::move(policy)), hp_(hp), rng_(seed),
          buffer_(hp.capacity) {
        hp_.validate();
        const auto &spec = env_.spec();
        const int in = spec.obs_dim + spec.act_dim;
        q1_ = nn::DenseNet({in, 64, 64, 1});
        q2_ = nn::DenseNet({in, 64, 64, 1});
        q1_.init_random(rng_);
        q2_.init_random(rng_);
        t1_ = q1_;
        t2_ = q2_;
        adam_q1_ = nn::Adam(q1_.param_count(), hp_.lr_critic);
        adam_q2_ = nn::Adam(q2_.param_count(), hp_.lr_critic);
        log_alpha_ = std::log(std::max(hp_.alpha, 1e-8));
        adam_alpha_ = nn::Adam(1, hp_.lr_alpha);
        target_entropy_ = -static_cast<double>(spec.act_dim);
        scale_jac_ = envs::action_scale_jacobian(spec);
    }

    [[nodiscard]] double alpha() const { return std::exp(log_alpha_); }
    [[nodiscard]] const SacHyperparams &hyperparams() const { return hp_; }
    [[nodiscard]] PolicyBackend &policy() { return *policy_; }
    [[nodiscard]] ReplayBuffer &buffer() { return buffer_; }
    [[nodiscard]] nn::DenseNet &critic1() { return q1_; }
    [[nodiscard]] nn::DenseNet &critic2() { return q2_; }
    [[nodiscard]] nn::DenseNet &target1() { return t1_; }
    [[nodiscard]] nn::DenseNet &target2() { return t2_; }
    [[nodiscard]] std::mt19937_64 &rng() { return rng_; }
    [[nodiscard]] std::size_t total_env_steps() const { return total_steps_; }

    /// When set, update phases append their names, in call order.
    void set_call_log(std::vector<std::string> *log) { call_log_ = log; }

    /// Deterministic-evaluation action in (-1, 1): tanh(mu).
    [[nodiscard]] std::vector<double>
    deterministic_action(std::span<const double> obs) {
        const auto dist = policy_->forward(obs);
        std::vector<double> a(dist.mu.size());
        for (std::size_t d = 0; d < a.size(); ++d) {
            a[d] = std::tanh(dist.mu[d]);
        }
        return a;
    }

    /// Stochastic action in (-1, 1) plus its log density.
    pqc::PolicyOutput sample_policy(std::span<const double> obs) {
        const auto dist = policy_->forward(obs);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> noise(dist.mu.size());
        for (auto &n : noise) {
            n = normal(rng_);
        }
        return pqc::sample_action(dist.mu, dist.sigma, noise);
    }

    /// One environment interaction plus any scheduled updates.
    StepInfo train_step() {
        if (!episode_active_) {
            obs_ = env_.reset(rng_());
            episode_active_ = true;
            episode_return_ = 0.0;
            episode_len_ = 0;
        }

        std::vector<double> env_action;
        if (total_steps_ < hp_.start_steps) {
            const auto &spec = env_.spec();
            env_action.resize(static_cast<std::size_t>(spec.act_dim));
            for (int d = 0; d < spec.act_dim; ++d) {
                std::uniform_real_distribution<double> dist(
                    spec.action_low[static_cast<std::size_t>(d)],
                    spec.action_high[static_cast<std::size_t>(d)]);
                env_action[static_cast<std::size_t>(d)] = dist(rng_);
            }
        } else {
            const auto out = sample_policy(obs_);
            env_action = envs::scale_action(env_.spec(), out.action);
        }

        const auto result = env_.step(env_action);
        ++total_steps_;
        episode_return_ += result.reward;
        ++episode_len_;

        Transition t;
        t.obs = obs_;
        t.action = env_action;
        t.reward = result.reward;
        t.next_obs = result.obs;
        t.done = result.terminated;  // truncation bootstraps on
        buffer_.push(std::move(t));
        obs_ = result.obs;

        StepInfo info;
        info.total_env_steps = total_steps_;
        info.alpha = effective_alpha();
        if (result.terminated || result.truncated) {
            episode_active_ = false;
            info.episode_done = true;
            info.episode_return = episode_return_;
            info.episode_length = episode_len_;
        }

        const bool warm = total_steps_ >= hp_.start_steps;
        if (warm && buffer_.size() >= hp_.batch_size &&
            total_steps_ % hp_.update_every == 0) {
            const auto batch = buffer_.sample(hp_.batch_size, rng_);
            const auto [l1, l2] = critic_update(batch);
            const auto [ploss, mean_logpi] = policy_update(batch);
            if (hp_.auto_alpha) {
                alpha_update(mean_logpi);
            }
            if (call_log_) {
                call_log_->push_back("polyak_update");
            }
            polyak_update(t1_, q1_, hp_.tau);
            polyak_update(t2_, q2_, hp_.tau);
            info.updated = true;
            info.critic_loss_1 = l1;
            info.critic_loss_2 = l2;
            info.policy_loss = ploss;
            info.alpha = effective_alpha();
        }
        return info;
    }

    /// y = r + gamma * (1 - done) * (min(Q'1, Q'2)(s', a') - alpha * log pi(a'|s'))
    /// with a' freshly sampled from the current policy.
    [[nodiscard]] std::vector<double>
    compute_critic_targets(const std::vector<Transition> &batch) {
        if (batch.empty()) {
            throw UsageError("empty batch");
        }
        const double a = effective_alpha();
        std::vector<double> y(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const Transition &t = batch[i];
            if (t.done) {
                y[i] = t.reward;
                continue;
            }
            const auto out = sample_policy(t.next_obs);
            const auto env_action = envs::scale_action(env_.spec(), out.action);
            const double q1 = critic_value(t1_, t.next_obs, env_action);
            const double q2 = critic_value(t2_, t.next_obs, env_action);
            y[i] = bootstrap_target(t.reward, false, hp_.gamma,
                                    std::min(q1, q2), a, out.log_probability);
        }
        return y;
    }

    /// One Adam step per critic toward the shared targets; returns MSE losses.
    std::pair<double, double> critic_update(const std::vector<Transition> &batch) {
        if (call_log_) {
            call_log_->push_back("critic_update");
        }
        const auto y = compute_critic_targets(batch);
        const double l1 = critic_step(q1_, adam_q1_, batch, y);
        const double l2 = critic_step(q2_, adam_q2_, batch, y);
        return {l1, l2};
    }

    /// Minimizes mean(alpha * log pi(a~|s) - min Q(s, a~)) via the
    /// reparameterized action; critics held fixed.  Returns (loss, mean log pi).
    std::pair<double, double> policy_update(const std::vector<Transition> &batch) {
        if (call_log_) {
            call_log_->push_back("policy_update");
        }
        if (batch.empty()) {
            throw UsageError("empty batch");
        }
        const double a = effective_alpha();
        const int act_dim = policy_->act_dim();
        const double inv_n = 1.0 / static_cast<double>(batch.size());

        policy_->begin_update();
        double loss = 0.0;
        double sum_logpi = 0.0;
        std::normal_distribution<double> normal(0.0, 1.0);
        nn::ForwardCache cache;

        for (const Transition &t : batch) {
            const auto dist = policy_->forward(t.obs);
            std::vector<double> noise(static_cast<std::size_t>(act_dim));
            for (auto &n : noise) {
                n = normal(rng_);
            }
            const auto out = pqc::sample_action(dist.mu, dist.sigma, noise);
            const auto env_action = envs::scale_action(env_.spec(), out.action);

            const auto in = concat(t.obs, env_action);
            const double q1 = q1_.forward(in)[0];
            const double q2 = q2_.forward(in)[0];
            // only the min critic's action-gradient flows into the actor
            nn::DenseNet &qmin_net = q1 <= q2 ? q1_ : q2_;
            const double qmin = qmin_net.forward(in, &cache)[0];
            auto qgrads = qmin_net.zero_grads();
            const std::vector<double> one{1.0};
            qmin_net.backward(cache, one, qgrads);
            // dQ/d(env action) lives in the tail of the input gradient
            const std::size_t obs_dim = t.obs.size();

            loss += (a * out.log_probability - qmin) * inv_n;
            sum_logpi += out.log_probability * inv_n;

            std::vector<double> upstream(static_cast<std::size_t>(2 * act_dim));
            for (int d = 0; d < act_dim; ++d) {
                const std::size_t sd = static_cast<std::size_t>(d);
                const double u = out.pre_squash[sd];
                const double th = std::tanh(u);
                const double sech2 = 1.0 - th * th;
                const double tcorr =
                    2.0 * th * sech2 / (sech2 + pqc::kLogProbFloor);
                const double dq_da =
                    qgrads.input[obs_dim + sd] * scale_jac_[sd];
                const double dl_du = a * tcorr - dq_da * sech2;
                const double sig_eps = dist.sigma[sd] * noise[sd];
                upstream[sd] = dl_du * inv_n;
                upstream[static_cast<std::size_t>(act_dim + d)] =
                    (a * (-1.0 + tcorr * sig_eps) - dq_da * sech2 * sig_eps) *
                    inv_n;
            }
            policy_->accumulate(t.obs, upstream);
        }
        policy_->apply();
        return {loss, sum_logpi};
    }

    /// Gradient step on log alpha minimizing -alpha * (mean log pi + target
    /// entropy); the log parameterization keeps alpha positive.
    void alpha_update(double mean_log_pi) {
        if (call_log_) {
            call_log_->push_back("alpha_update");
        }
        const double grad =
            -std::exp(log_alpha_) * (mean_log_pi + target_entropy_);
        std::vector<double> p{log_alpha_};
        std::vector<double> g{grad};
        adam_alpha_.step(p, g);
        log_alpha_ = p[0];
    }

    [[nodiscard]] double critic_value(const nn::DenseNet &critic,
                                      std::span<const double> obs,
                                      std::span<const double> env_action) const {
        return critic.forward(concat(obs, env_action))[0];
    }

    [[nodiscard]] nlohmann::json checkpoint() const {
        std::ostringstream rng_state;
        rng_state << rng_;
        return {{"q1", q1_}, {"q2", q2_}, {"t1", t1_}, {"t2", t2_},
                {"adam_q1", adam_q1_}, {"adam_q2", adam_q2_},
                {"adam_alpha", adam_alpha_}, {"log_alpha", log_alpha_},
                {"policy", policy_->checkpoint()}, {"rng", rng_state.str()},
                {"total_steps", total_steps_}, {"hyperparams", hp_}};
    }

    void restore(const nlohmann::json &j) {
        j.at("q1").get_to(q1_);
        j.at("q2").get_to(q2_);
        j.at("t1").get_to(t1_);
        j.at("t2").get_to(t2_);
        j.at("adam_q1").get_to(adam_q1_);
        j.at("adam_q2").get_to(adam_q2_);
        j.at("adam_alpha").get_to(adam_alpha_);
        j.at("log_alpha").get_to(log_alpha_);
        policy_->restore(j.at("policy"));
        std::istringstream rng_state(j.at("rng").get<std::string>());
        rng_state >> rng_;
        j.at("total_steps").get_to(total_steps_);
        episode_active_ = false;
    }

  private:
    [[nodiscard]] double effective_alpha() const {
        return hp_.auto_alpha ? std::exp(log_alpha_) : hp_.alpha;
    }

    static std::vector<double> concat(std::span<const double> a,
                                      std::span<const double> b) {
        std::vector<double> out;
        out.reserve(a.size() + b.size());
        out.insert(out.end(), a.begin(), a.end());
        out.insert(out.end(), b.begin(), b.end());
        return out;
    }

    double critic_step(nn::DenseNet &critic, nn::Adam &adam,
                       const std::vector<Transition> &batch,
                       const std::vector<double> &y) {
        auto grads = critic.zero_grads();
        nn::ForwardCache cache;
        double loss = 0.0;
        const double inv_n = 1.0 / static_cast<double>(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const auto in = concat(batch[i].obs, batch[i].action);
            const double q = critic.forward(in, &cache)[0];
            const double err = q - y[i];
            loss += err * err * inv_n;
            const std::vector<double> upstream{2.0 * err * inv_n};
            critic.backward(cache, upstream, grads);
        }
        auto params = nn::flatten(critic.layers());
        adam.step(params, nn::flatten(grads.layers));
        nn::unflatten(params, critic.layers());
        return loss;
    }

    envs::Env &env_;
    std::unique_ptr<PolicyBackend> policy_;
    SacHyperparams hp_;
    std::mt19937_64 rng_;
    ReplayBuffer buffer_;
    nn::DenseNet q1_, q2_, t1_, t2_;
    nn::Adam adam_q1_, adam_q2_, adam_alpha_;
    double log_alpha_ = 0.0;
    double target_entropy_ = -1.0;
    std::vector<double> scale_jac_;

    std::vector<double> obs_;
    bool episode_active_ = false;
    double episode_return_ = 0.0;
    std::size_t episode_len_ = 0;
    std::size_t total_steps_ = 0;
    std::vector<std::string> *call_log_ = nullptr;
};

} // namespace qsac::sac

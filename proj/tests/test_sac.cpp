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

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "qsac/envs/pendulum.hpp"
#include "qsac/sac/policy_backend.hpp"
#include "qsac/sac/replay_buffer.hpp"
#include "qsac/sac/trainer.hpp"

using namespace qsac;
using namespace qsac::sac;
using Catch::Approx;

namespace {

Transition make_transition(double id, bool done = false) {
    Transition t;
    t.obs = {id, 0.0, 0.0};
    t.action = {0.0};
    t.reward = id;
    t.next_obs = {id, 0.0, 0.0};
    t.done = done;
    return t;
}

/// Force a critic net to a constant output c regardless of input.
void make_constant(nn::DenseNet &net, double c) {
    for (auto &l : net.layers()) {
        std::fill(l.w.begin(), l.w.end(), 0.0);
        std::fill(l.b.begin(), l.b.end(), 0.0);
    }
    net.layers().back().b[0] = c;
}

SacTrainer make_pendulum_trainer(envs::PendulumEnv &env, SacHyperparams hp,
                                 std::uint64_t seed = 1) {
    std::mt19937_64 init_rng(seed + 1000);
    auto policy = std::make_unique<ClassicalPolicy>(3, 1, hp.lr_actor, init_rng);
    return SacTrainer(env, std::move(policy), hp, seed);
}

} // namespace

TEST_CASE("replay buffer: FIFO eviction") {
    ReplayBuffer buf(3);
    for (double id : {1.0, 2.0, 3.0, 4.0}) {
        buf.push(make_transition(id));
    }
    REQUIRE(buf.size() == 3);
    std::set<double> contents;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        contents.insert(buf.at(i).reward);
    }
    REQUIRE(contents == std::set<double>{2.0, 3.0, 4.0});
}

TEST_CASE("replay buffer: sampling one of one") {
    ReplayBuffer buf(10);
    buf.push(make_transition(7.0));
    std::mt19937_64 rng(0);
    const auto batch = buf.sample(1, rng);
    REQUIRE(batch.size() == 1);
    REQUIRE(batch[0].reward == 7.0);
}

TEST_CASE("replay buffer: sampling empty is a usage error") {
    ReplayBuffer buf(10);
    std::mt19937_64 rng(0);
    REQUIRE_THROWS_AS(buf.sample(1, rng), UsageError);
}

TEST_CASE("replay buffer: uniform sampling passes a chi-squared test") {
    ReplayBuffer buf(10);
    for (int i = 0; i < 10; ++i) {
        buf.push(make_transition(static_cast<double>(i)));
    }
    std::mt19937_64 rng(4242);
    const int n = 100000;
    std::vector<int> counts(10, 0);
    const auto batch = buf.sample(n, rng);
    for (const auto &t : batch) {
        counts[static_cast<std::size_t>(t.reward)]++;
    }
    const double expected = n / 10.0;
    double chi2 = 0.0;
    for (int c : counts) {
        chi2 += (c - expected) * (c - expected) / expected;
    }
    // 9 degrees of freedom, p > 0.01 requires chi2 < 21.666
    REQUIRE(chi2 < 21.666);
}

TEST_CASE("bootstrap target arithmetic") {
    // terminal cutoff
    REQUIRE(bootstrap_target(1.5, true, 0.99, 100.0, 0.2, -3.0) == 1.5);
    // worked example: 1 + 0.99 * (2.0 - 0.2 * (-1.0)) = 3.178
    REQUIRE(bootstrap_target(1.0, false, 0.99, 2.0, 0.2, -1.0) ==
            Approx(3.178).margin(1e-12));
    // myopic limit
    REQUIRE(bootstrap_target(0.7, false, 0.0, 55.0, 0.3, -2.0) == Approx(0.7));
}

TEST_CASE("compute_critic_targets: terminal masking and twin-min bound") {
    envs::PendulumEnv env;
    SacHyperparams hp;
    hp.auto_alpha = false;
    hp.alpha = 0.0;  // removes the entropy term so targets are deterministic
    auto trainer = make_pendulum_trainer(env, hp);

    make_constant(trainer.target1(), 2.0);
    make_constant(trainer.target2(), 5.0);

    std::vector<Transition> batch;
    batch.push_back(make_transition(1.0, true));
    batch.push_back(make_transition(3.0, false));

    const auto y = trainer.compute_critic_targets(batch);
    REQUIRE(y[0] == 1.0);  // done: exactly r
    // twin-min: bootstrapped on min(2, 5) = 2, never on 5
    REQUIRE(y[1] == Approx(3.0 + 0.99 * 2.0).margin(1e-12));
    REQUIRE(y[1] <= 3.0 + 0.99 * 5.0);
}

TEST_CASE("compute_critic_targets: gamma = 0 is the myopic limit") {
    envs::PendulumEnv env;
    SacHyperparams hp;
    hp.gamma = 0.0;
    auto trainer = make_pendulum_trainer(env, hp);
    std::vector<Transition> batch;
    for (double r : {0.5, -2.0, 7.0}) {
        batch.push_back(make_transition(r, false));
    }
    const auto y = trainer.compute_critic_targets(batch);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        REQUIRE(y[i] == Approx(batch[i].reward).margin(1e-12));
    }
}

TEST_CASE("critic_update: critics already on target have zero loss") {
    envs::PendulumEnv env;
    SacHyperparams hp;
    auto trainer = make_pendulum_trainer(env, hp);

    make_constant(trainer.critic1(), 4.0);
    make_constant(trainer.critic2(), 4.0);
    std::vector<Transition> batch{make_transition(4.0, true)};

    const auto before1 = nn::flatten(trainer.critic1().layers());
    const auto [l1, l2] = trainer.critic_update(batch);
    REQUIRE(l1 == 0.0);
    REQUIRE(l2 == 0.0);
    // zero gradient means Adam leaves parameters exactly in place
    REQUIRE(nn::flatten(trainer.critic1().layers()) == before1);
}

TEST_CASE("critic_update: reported loss equals an independent recomputation") {
    envs::PendulumEnv env;
    SacHyperparams hp;
    auto trainer = make_pendulum_trainer(env, hp, 77);

    std::vector<Transition> batch;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 8; ++i) {
        Transition t;
        t.obs = {dist(rng), dist(rng), dist(rng)};
        t.action = {dist(rng)};
        t.reward = dist(rng);
        t.next_obs = t.obs;
        t.done = true;  // y = r, independent of policy sampling
        batch.push_back(t);
    }
    // recompute mean((Q - r)^2) before the update mutates the critics
    double want1 = 0.0, want2 = 0.0;
    const double inv_n = 1.0 / 8.0;
    for (const auto &t : batch) {
        const double q1 = trainer.critic_value(trainer.critic1(), t.obs, t.action);
        const double q2 = trainer.critic_value(trainer.critic2(), t.obs, t.action);
        want1 += (q1 - t.reward) * (q1 - t.reward) * inv_n;
        want2 += (q2 - t.reward) * (q2 - t.reward) * inv_n;
    }
    const auto [l1, l2] = trainer.critic_update(batch);
    REQUIRE(l1 == Approx(want1).margin(1e-12));
    REQUIRE(l2 == Approx(want2).margin(1e-12));
}

TEST_CASE("critic MSE gradient matches finite differences") {
    // same loss assembly as the trainer: L = mean((Q - y)^2)
    std::mt19937_64 rng(31);
    nn::DenseNet critic({4, 8, 1});
    critic.init_random(rng);
    const std::vector<std::vector<double>> inputs{
        {0.1, -0.2, 0.3, 0.4}, {-0.5, 0.6, -0.7, 0.8}};
    const std::vector<double> y{1.0, -2.0};

    auto loss = [&] {
        double l = 0.0;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const double q = critic.forward(inputs[i])[0];
            l += (q - y[i]) * (q - y[i]) / 2.0;
        }
        return l;
    };
    auto grads = critic.zero_grads();
    nn::ForwardCache cache;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const double q = critic.forward(inputs[i], &cache)[0];
        critic.backward(cache, std::vector<double>{2.0 * (q - y[i]) / 2.0}, grads);
    }
    const double h = 1e-5;
    for (std::size_t li = 0; li < critic.layers().size(); ++li) {
        auto &l = critic.layers()[li];
        for (std::size_t wi = 0; wi < l.w.size(); wi += 5) {
            const double orig = l.w[wi];
            l.w[wi] = orig + h;
            const double plus = loss();
            l.w[wi] = orig - h;
            const double minus = loss();
            l.w[wi] = orig;
            REQUIRE(grads.layers[li].w[wi] ==
                    Approx((plus - minus) / (2.0 * h)).margin(1e-5));
        }
    }
}

TEST_CASE("policy_update: reported loss equals an independent recomputation") {
    envs::PendulumEnv env;
    SacHyperparams hp;
    hp.auto_alpha = false;
    hp.alpha = 0.2;
    auto trainer = make_pendulum_trainer(env, hp, 99);

    std::vector<Transition> batch;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 4; ++i) {
        Transition t;
        t.obs = {dist(rng), dist(rng), dist(rng)};
        t.action = {0.0};
        t.reward = 0.0;
        t.next_obs = t.obs;
        batch.push_back(t);
    }

    // replicate the sampling sequence with a copy of the trainer RNG
    std::mt19937_64 shadow = trainer.rng();
    std::normal_distribution<double> normal(0.0, 1.0);
    double want = 0.0;
    const double inv_n = 1.0 / 4.0;
    for (const auto &t : batch) {
        const auto d = trainer.policy().forward(t.obs);
        std::vector<double> noise(1);
        noise[0] = normal(shadow);
        const auto out = pqc::sample_action(d.mu, d.sigma, noise);
        const auto env_action = envs::scale_action(env.spec(), out.action);
        const double q1 = trainer.critic_value(trainer.critic1(), t.obs, env_action);
        const double q2 = trainer.critic_value(trainer.critic2(), t.obs, env_action);
        want += (0.2 * out.log_probability - std::min(q1, q2)) * inv_n;
    }

    const auto [loss, mean_logpi] = trainer.policy_update(batch);
    REQUIRE(loss == Approx(want).margin(1e-12));
    (void)mean_logpi;
}

TEST_CASE("policy_update: constant critics and alpha=0 leave the policy still") {
    envs::PendulumEnv env;
    SacHyperparams hp;
    hp.auto_alpha = false;
    hp.alpha = 0.0;
    auto trainer = make_pendulum_trainer(env, hp, 3);
    make_constant(trainer.critic1(), 1.0);
    make_constant(trainer.critic2(), 1.0);

    auto &policy = dynamic_cast<ClassicalPolicy &>(trainer.policy());
    const auto before = nn::flatten(policy.net().layers());
    std::vector<Transition> batch{make_transition(0.0)};
    trainer.policy_update(batch);
    // zero upstream everywhere -> Adam sees zero gradient -> no movement
    REQUIRE(nn::flatten(policy.net().layers()) == before);
}

TEST_CASE("policy_update: loss decreases against a learned quadratic critic") {
    envs::PendulumEnv env;
    SacHyperparams hp;
    hp.auto_alpha = false;
    hp.alpha = 0.0;
    hp.lr_actor = 3e-3;
    auto trainer = make_pendulum_trainer(env, hp, 8);

    // teach both critics Q(s, a) = -(a - 0.5)^2 on the action range
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> a_dist(-2.0, 2.0);
    std::uniform_real_distribution<double> s_dist(-1.0, 1.0);
    for (nn::DenseNet *critic : {&trainer.critic1(), &trainer.critic2()}) {
        nn::Adam adam(critic->param_count(), 1e-2);
        for (int step = 0; step < 2000; ++step) {
            auto grads = critic->zero_grads();
            nn::ForwardCache cache;
            for (int i = 0; i < 16; ++i) {
                const std::vector<double> in{s_dist(rng), s_dist(rng),
                                             s_dist(rng), a_dist(rng)};
                const double target = -(in[3] - 0.5) * (in[3] - 0.5);
                const double q = critic->forward(in, &cache)[0];
                critic->backward(cache,
                                 std::vector<double>{2.0 * (q - target) / 16.0},
                                 grads);
            }
            auto params = nn::flatten(critic->layers());
            adam.step(params, nn::flatten(grads.layers));
            nn::unflatten(params, critic->layers());
        }
    }

    std::vector<Transition> batch;
    for (int i = 0; i < 16; ++i) {
        Transition t;
        t.obs = {s_dist(rng), s_dist(rng), s_dist(rng)};
        t.action = {0.0};
        t.next_obs = t.obs;
        batch.push_back(t);
    }
    double first = 0.0, last = 0.0;
    for (int it = 0; it < 50; ++it) {
        const auto [loss, lp] = trainer.policy_update(batch);
        (void)lp;
        if (it == 0) {
            first = loss;
        }
        last = loss;
    }
    REQUIRE(last < first);
}

TEST_CASE("alpha_update: fixed point and gradient direction") {
    envs::PendulumEnv env;
    SacHyperparams hp;  // auto_alpha on, act_dim = 1 -> target entropy -1
    auto trainer = make_pendulum_trainer(env, hp);

    const double before = trainer.alpha();
    trainer.alpha_update(1.0);  // mean log pi = -target_entropy: zero gradient
    REQUIRE(trainer.alpha() == before);

    // entropy too low (log pi above -target_entropy): alpha must grow
    trainer.alpha_update(5.0);
    REQUIRE(trainer.alpha() > before);
}

TEST_CASE("alpha stays positive under adversarial updates") {
    envs::PendulumEnv env;
    SacHyperparams hp;
    auto trainer = make_pendulum_trainer(env, hp);
    for (int i = 0; i < 100000; ++i) {
        trainer.alpha_update(i % 2 == 0 ? 1e6 : -1e6);
    }
    REQUIRE(trainer.alpha() > 0.0);
}

TEST_CASE("polyak identities") {
    std::mt19937_64 rng(2);
    nn::DenseNet online({2, 3, 1});
    online.init_random(rng);

    SECTION("tau = 1 copies") {
        nn::DenseNet target({2, 3, 1});
        polyak_update(target, online, 1.0);
        REQUIRE(nn::flatten(target.layers()) == nn::flatten(online.layers()));
    }
    SECTION("tau = 0 freezes") {
        nn::DenseNet target({2, 3, 1});
        target.init_random(rng);
        const auto before = nn::flatten(target.layers());
        polyak_update(target, online, 0.0);
        REQUIRE(nn::flatten(target.layers()) == before);
    }
    SECTION("tau = 0.005 from 0 toward 1") {
        nn::DenseNet target({2, 3, 1});  // zeros
        nn::DenseNet ones({2, 3, 1});
        for (auto &l : ones.layers()) {
            std::fill(l.w.begin(), l.w.end(), 1.0);
            std::fill(l.b.begin(), l.b.end(), 1.0);
        }
        polyak_update(target, ones, 0.005);
        for (double v : nn::flatten(target.layers())) {
            REQUIRE(v == Approx(0.005).margin(1e-15));
        }
    }
}

TEST_CASE("polyak lag: gap contracts as (1 - tau)^k with frozen online") {
    std::mt19937_64 rng(44);
    nn::DenseNet online({2, 4, 1});
    online.init_random(rng);
    nn::DenseNet target({2, 4, 1});
    target.init_random(rng);

    const double tau = 0.1;
    const auto o = nn::flatten(online.layers());
    const auto t0 = nn::flatten(target.layers());
    const int k = 25;
    for (int i = 0; i < k; ++i) {
        polyak_update(target, online, tau);
    }
    const auto tk = nn::flatten(target.layers());
    const double shrink = std::pow(1.0 - tau, k);
    for (std::size_t i = 0; i < o.size(); ++i) {
        REQUIRE(tk[i] - o[i] == Approx((t0[i] - o[i]) * shrink).margin(1e-12));
    }
}

TEST_CASE("warmup: uniform actions, no updates, no parameter changes") {
    envs::PendulumEnv env;
    SacHyperparams hp;
    hp.start_steps = 100;
    hp.batch_size = 4;
    auto trainer = make_pendulum_trainer(env, hp);
    auto &policy = dynamic_cast<ClassicalPolicy &>(trainer.policy());
    const auto policy_before = nn::flatten(policy.net().layers());
    const auto critic_before = nn::flatten(trainer.critic1().layers());

    for (int i = 0; i < 50; ++i) {
        const auto info = trainer.train_step();
        REQUIRE_FALSE(info.updated);
    }
    for (std::size_t i = 0; i < trainer.buffer().size(); ++i) {
        const double a = trainer.buffer().at(i).action[0];
        REQUIRE(a >= -envs::PendulumEnv::kMaxTorque);
        REQUIRE(a <= envs::PendulumEnv::kMaxTorque);
    }
    REQUIRE(nn::flatten(policy.net().layers()) == policy_before);
    REQUIRE(nn::flatten(trainer.critic1().layers()) == critic_before);
}

TEST_CASE("update phases run in the contracted order") {
    envs::PendulumEnv env;
    SacHyperparams hp;
    hp.start_steps = 5;
    hp.batch_size = 4;
    auto trainer = make_pendulum_trainer(env, hp);
    std::vector<std::string> log;
    trainer.set_call_log(&log);
    StepInfo info;
    for (int i = 0; i < 10 && !info.updated; ++i) {
        info = trainer.train_step();
    }
    REQUIRE(info.updated);
    REQUIRE(log == std::vector<std::string>{"critic_update", "policy_update",
                                            "alpha_update", "polyak_update"});
}

TEST_CASE("train_step is deterministic for a fixed seed") {
    auto run = [] {
        envs::PendulumEnv env;
        SacHyperparams hp;
        hp.start_steps = 50;
        hp.batch_size = 16;
        auto trainer = make_pendulum_trainer(env, hp, 2026);
        std::vector<double> returns;
        for (int i = 0; i < 500; ++i) {
            const auto info = trainer.train_step();
            if (info.episode_done) {
                returns.push_back(info.episode_return);
            }
        }
        return returns;
    };
    REQUIRE(run() == run());
}

TEST_CASE("both policy backends drive the same trainer code path") {
    envs::PendulumEnv env;
    SacHyperparams hp;
    hp.start_steps = 8;
    hp.batch_size = 4;

    SECTION("classical") {
        auto trainer = make_pendulum_trainer(env, hp, 5);
        bool updated = false;
        for (int i = 0; i < 20; ++i) {
            updated = trainer.train_step().updated || updated;
        }
        REQUIRE(updated);
    }
    SECTION("quantum") {
        pqc::ReuploadingPolicyConfig cfg;
        cfg.obs_dim = 3;
        cfg.act_dim = 1;
        cfg.n_layers = 2;
        cfg.use_input_scaling = true;
        std::mt19937_64 init_rng(9);
        auto policy = std::make_unique<QuantumPolicy>(cfg, hp.lr_actor, init_rng);
        auto *raw = policy.get();
        SacTrainer trainer(env, std::move(policy), hp, 5);
        const auto before = raw->params().circuit_params;
        bool updated = false;
        for (int i = 0; i < 20; ++i) {
            updated = trainer.train_step().updated || updated;
        }
        REQUIRE(updated);
        REQUIRE(raw->params().circuit_params != before);
    }
}

TEST_CASE("trainer checkpoint restores critics, alpha, and rng") {
    envs::PendulumEnv env;
    SacHyperparams hp;
    hp.start_steps = 8;
    hp.batch_size = 4;
    auto trainer = make_pendulum_trainer(env, hp, 55);
    for (int i = 0; i < 30; ++i) {
        trainer.train_step();
    }
    const auto ck = trainer.checkpoint();

    auto other = make_pendulum_trainer(env, hp, 999);
    other.restore(ck);
    REQUIRE(nn::flatten(other.critic1().layers()) ==
            nn::flatten(trainer.critic1().layers()));
    REQUIRE(other.alpha() == trainer.alpha());
    REQUIRE(other.total_env_steps() == trainer.total_env_steps());
}

TEST_CASE("hyperparameter validation") {
    SacHyperparams hp;
    hp.gamma = 1.0;
    REQUIRE_THROWS_AS(hp.validate(), ConfigError);
    hp = SacHyperparams{};
    hp.tau = 0.0;
    REQUIRE_THROWS_AS(hp.validate(), ConfigError);
    hp = SacHyperparams{};
    hp.batch_size = 0;
    REQUIRE_THROWS_AS(hp.validate(), ConfigError);
}

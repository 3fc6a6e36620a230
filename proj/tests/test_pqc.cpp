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

#include <random>
#include <set>

#include "qsac/pqc/policy.hpp"

using namespace qsac;
using namespace qsac::pqc;
using Catch::Approx;

namespace {

// Independent count of distinct trainable/feature indices in a gate list.
std::pair<int, int> enumerate_indices(const qsim::CircuitSpec &spec) {
    std::set<int> trainables;
    std::set<int> features;
    for (const auto &g : spec.gates) {
        if (g.kind == qsim::GateKind::CZ) {
            continue;
        }
        if (g.angle.kind == qsim::AngleSource::Kind::TrainableParam) {
            trainables.insert(g.angle.param_index);
        } else if (g.angle.kind == qsim::AngleSource::Kind::DataFeature) {
            features.insert(g.angle.feature_index);
            if (g.angle.param_index >= 0) {
                trainables.insert(g.angle.param_index);
            }
        }
    }
    return {static_cast<int>(trainables.size()),
            static_cast<int>(features.size())};
}

ReuploadingPolicyConfig small_cfg() {
    ReuploadingPolicyConfig cfg;
    cfg.obs_dim = 3;
    cfg.act_dim = 2;
    cfg.n_layers = 2;
    cfg.use_input_scaling = true;
    return cfg;
}

double mu_half_norm_loss(const ReuploadingPolicyConfig &cfg,
                         const qsim::CircuitSpec &spec,
                         const PolicyParams &params,
                         const std::vector<double> &obs) {
    const auto fwd = policy_forward(cfg, spec, params, obs);
    double l = 0.0;
    for (double m : fwd.mu) {
        l += 0.5 * m * m;
    }
    return l;
}

} // namespace

TEST_CASE("re-uploading circuit: paper-scale trainable counts") {
    ReuploadingPolicyConfig cfg;
    cfg.obs_dim = 17;
    cfg.act_dim = 6;
    cfg.n_layers = 2;
    const auto spec = build_reuploading_circuit(cfg);
    REQUIRE(spec.n_trainable == 34);
    REQUIRE(spec.n_features == 17);
    const auto [nt, nf] = enumerate_indices(spec);
    REQUIRE(nt == spec.n_trainable);
    REQUIRE(nf == spec.n_features);
}

TEST_CASE("re-uploading circuit: smallest instance has no CZ") {
    ReuploadingPolicyConfig cfg;
    cfg.obs_dim = 1;
    cfg.act_dim = 1;
    cfg.n_layers = 1;
    const auto spec = build_reuploading_circuit(cfg);
    REQUIRE(spec.gates.size() == 2);
    REQUIRE(spec.gates[0].kind == qsim::GateKind::RX);
    REQUIRE(spec.gates[0].angle.kind == qsim::AngleSource::Kind::DataFeature);
    REQUIRE(spec.gates[0].angle.feature_index == 0);
    REQUIRE(spec.gates[1].kind == qsim::GateKind::RY);
    REQUIRE(spec.gates[1].angle.kind == qsim::AngleSource::Kind::TrainableParam);
    REQUIRE(spec.gates[1].angle.param_index == 0);
}

TEST_CASE("re-uploading circuit: input scaling doubles the trainables") {
    const auto spec = build_reuploading_circuit(small_cfg());
    REQUIRE(spec.n_trainable == 12);  // 2 layers x 3 qubits x 2
    const auto [nt, nf] = enumerate_indices(spec);
    REQUIRE(nt == 12);
    REQUIRE(nf == 3);
}

TEST_CASE("two-qubit ring emits a single CZ") {
    ReuploadingPolicyConfig cfg;
    cfg.obs_dim = 2;
    cfg.act_dim = 1;
    cfg.n_layers = 1;
    const auto spec = build_reuploading_circuit(cfg);
    int czs = 0;
    for (const auto &g : spec.gates) {
        czs += g.kind == qsim::GateKind::CZ ? 1 : 0;
    }
    REQUIRE(czs == 1);
}

TEST_CASE("policy_forward: zero head forces mu = 0, sigma = 1") {
    const auto cfg = small_cfg();
    const auto spec = build_reuploading_circuit(cfg);
    std::mt19937_64 rng(3);
    auto params = init_policy_params(cfg, rng);
    std::fill(params.head_w.begin(), params.head_w.end(), 0.0);
    std::fill(params.head_b.begin(), params.head_b.end(), 0.0);
    const auto fwd =
        policy_forward(cfg, spec, params, std::vector<double>{0.5, -0.2, 1.3});
    for (double m : fwd.mu) {
        REQUIRE(m == 0.0);
    }
    for (double s : fwd.sigma) {
        REQUIRE(s == 1.0);
    }
}

TEST_CASE("policy_forward: paper dims give 6-component mu and sigma") {
    ReuploadingPolicyConfig cfg;
    cfg.obs_dim = 17;
    cfg.act_dim = 6;
    cfg.n_layers = 2;
    const auto spec = build_reuploading_circuit(cfg);
    std::mt19937_64 rng(11);
    const auto params = init_policy_params(cfg, rng);
    std::vector<double> obs(17, 0.1);
    const auto fwd = policy_forward(cfg, spec, params, obs);
    REQUIRE(fwd.mu.size() == 6);
    REQUIRE(fwd.sigma.size() == 6);
}

TEST_CASE("sigma respects the log-std clamp") {
    const auto cfg = small_cfg();
    const auto spec = build_reuploading_circuit(cfg);
    std::mt19937_64 rng(5);
    auto params = init_policy_params(cfg, rng);
    // huge biases saturate both clamp edges
    params.head_b[2] = 100.0;   // log_std row 0
    params.head_b[3] = -100.0;  // log_std row 1
    const auto fwd =
        policy_forward(cfg, spec, params, std::vector<double>{1.0, 2.0, 3.0});
    REQUIRE(fwd.sigma[0] == Approx(std::exp(2.0)));
    REQUIRE(fwd.sigma[1] == Approx(std::exp(-5.0)));
    for (double s : fwd.sigma) {
        REQUIRE(s >= std::exp(-5.0) - 1e-15);
        REQUIRE(s <= std::exp(2.0) + 1e-15);
    }
}

TEST_CASE("policy_forward: expectations feeding the head lie in [-1,1]") {
    const auto cfg = small_cfg();
    const auto spec = build_reuploading_circuit(cfg);
    std::mt19937_64 rng(17);
    const auto params = init_policy_params(cfg, rng);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<double> obs{dist(rng), dist(rng), dist(rng)};
        const auto fwd = policy_forward(cfg, spec, params, obs);
        for (double z : fwd.expectations) {
            REQUIRE(z >= -1.0 - 1e-12);
            REQUIRE(z <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("sample_action: zero noise is the deterministic mode") {
    const std::vector<double> mu{0.3, -1.2};
    const std::vector<double> sigma{0.5, 0.7};
    const std::vector<double> noise{0.0, 0.0};
    const auto out = sample_action(mu, sigma, noise);
    REQUIRE(out.action[0] == Approx(std::tanh(0.3)));
    REQUIRE(out.action[1] == Approx(std::tanh(-1.2)));
    for (double a : out.action) {
        REQUIRE(a > -1.0);
        REQUIRE(a < 1.0);
    }
}

TEST_CASE("sample_action: standard normal at the mode") {
    const std::vector<double> mu{0.0};
    const std::vector<double> sigma{1.0};
    const auto out = sample_action(mu, sigma, std::vector<double>{0.0});
    REQUIRE(out.log_probability == Approx(-0.9189385).margin(1e-4));
}

TEST_CASE("sample_action: unit noise value") {
    const std::vector<double> mu{0.0};
    const std::vector<double> sigma{1.0};
    const auto out = sample_action(mu, sigma, std::vector<double>{1.0});
    REQUIRE(out.log_probability == Approx(-0.55138).margin(1e-4));
}

TEST_CASE("sample_action log_prob field matches a direct log_prob call") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> mu(3), sigma(3), noise(3);
        for (int d = 0; d < 3; ++d) {
            mu[d] = dist(rng);
            sigma[d] = std::exp(dist(rng));
            noise[d] = normal(rng);
        }
        const auto out = sample_action(mu, sigma, noise);
        REQUIRE(out.log_probability == log_prob(mu, sigma, out.pre_squash));
    }
}

TEST_CASE("log_prob at u = mu collapses to the closed form") {
    const std::vector<double> mu{0.4, -0.9};
    const std::vector<double> sigma{1.0, 1.0};
    const double got = log_prob(mu, sigma, mu);
    const double half_ln_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    double want = -2.0 * half_ln_2pi;
    for (double m : mu) {
        const double t = std::tanh(m);
        want -= std::log(1.0 - t * t + 1e-6);
    }
    REQUIRE(got == Approx(want).margin(1e-12));
}

TEST_CASE("log_prob stays finite deep in the tanh tails") {
    const std::vector<double> mu{0.0};
    const std::vector<double> sigma{1.0};
    const std::vector<double> u{20.0};
    const double lp = log_prob(mu, sigma, u);
    REQUIRE(std::isfinite(lp));
}

TEST_CASE("log_prob agrees with a Monte-Carlo density estimate") {
    const double mu = 0.3;
    const double sigma = 0.8;
    std::mt19937_64 rng(31415);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double a0 = 0.2;
    const double half_width = 0.01;
    const int n = 1000000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        const double a = std::tanh(mu + sigma * normal(rng));
        if (std::abs(a - a0) < half_width) {
            ++hits;
        }
    }
    const double density_mc =
        static_cast<double>(hits) / n / (2.0 * half_width);
    const std::vector<double> vmu{mu}, vsig{sigma},
        u{0.5 * std::log((1.0 + a0) / (1.0 - a0))};  // atanh(a0)
    const double density_lp = std::exp(log_prob(vmu, vsig, u));
    REQUIRE(density_mc == Approx(density_lp).epsilon(0.05));
}

TEST_CASE("policy_gradient: zero upstream gives zero gradients") {
    const auto cfg = small_cfg();
    const auto spec = build_reuploading_circuit(cfg);
    std::mt19937_64 rng(7);
    const auto params = init_policy_params(cfg, rng);
    auto grads = zero_policy_grads(params);
    policy_gradient(cfg, spec, params, std::vector<double>{0.1, 0.2, 0.3},
                    std::vector<double>(4, 0.0), grads);
    for (double g : grads.circuit_params) {
        REQUIRE(g == 0.0);
    }
    for (double g : grads.head_w) {
        REQUIRE(g == 0.0);
    }
    for (double g : grads.head_b) {
        REQUIRE(g == 0.0);
    }
}

TEST_CASE("policy_gradient matches finite differences of 0.5*||mu||^2") {
    const auto cfg = small_cfg();
    const auto spec = build_reuploading_circuit(cfg);
    std::mt19937_64 rng(77);
    auto params = init_policy_params(cfg, rng);
    const std::vector<double> obs{0.4, -1.1, 2.0};

    const auto fwd = policy_forward(cfg, spec, params, obs);
    std::vector<double> upstream(4, 0.0);
    upstream[0] = fwd.mu[0];  // dL/dmu = mu for L = 0.5*||mu||^2
    upstream[1] = fwd.mu[1];

    auto grads = zero_policy_grads(params);
    policy_gradient(cfg, spec, params, obs, upstream, grads);

    const double h = 1e-5;
    auto check = [&](double &slot, double got) {
        const double orig = slot;
        slot = orig + h;
        const double plus = mu_half_norm_loss(cfg, spec, params, obs);
        slot = orig - h;
        const double minus = mu_half_norm_loss(cfg, spec, params, obs);
        slot = orig;
        const double fd = (plus - minus) / (2.0 * h);
        REQUIRE(got == Approx(fd).margin(1e-4 * std::max(1.0, std::abs(fd))));
    };
    for (std::size_t i = 0; i < params.circuit_params.size(); ++i) {
        check(params.circuit_params[i], grads.circuit_params[i]);
    }
    for (std::size_t i = 0; i < params.head_w.size(); ++i) {
        check(params.head_w[i], grads.head_w[i]);
    }
    for (std::size_t i = 0; i < params.head_b.size(); ++i) {
        check(params.head_b[i], grads.head_b[i]);
    }
}

TEST_CASE("policy_gradient: saturated log_std rows contribute nothing") {
    const auto cfg = small_cfg();
    const auto spec = build_reuploading_circuit(cfg);
    std::mt19937_64 rng(13);
    auto params = init_policy_params(cfg, rng);
    params.head_b[2] = 100.0;  // saturate log_std row 0 at the upper bound
    const std::vector<double> obs{0.3, 0.6, -0.9};

    std::vector<double> upstream{0.0, 0.0, 5.0, 0.0};  // only saturated row
    auto grads = zero_policy_grads(params);
    policy_gradient(cfg, spec, params, obs, upstream, grads);
    for (double g : grads.circuit_params) {
        REQUIRE(g == 0.0);
    }
    for (double g : grads.head_w) {
        REQUIRE(g == 0.0);
    }
    // the bias of the saturated row itself is also clamped to zero gradient
    for (double g : grads.head_b) {
        REQUIRE(g == 0.0);
    }
}

TEST_CASE("param_count: paper dims") {
    ReuploadingPolicyConfig cfg;
    cfg.obs_dim = 17;
    cfg.act_dim = 6;
    cfg.n_layers = 2;
    const auto r = param_count(cfg);
    REQUIRE(r.quantum_policy == 34 + (12 * 17 + 12));  // 250
    // independent enumeration of the baseline MLP(17 -> 64 -> 64 -> 12)
    const std::size_t baseline =
        (17 * 64 + 64) + (64 * 64 + 64) + (64 * 12 + 12);
    REQUIRE(r.classical_baseline == baseline);
}

TEST_CASE("param_count: smallest instance") {
    ReuploadingPolicyConfig cfg;
    cfg.obs_dim = 1;
    cfg.act_dim = 1;
    cfg.n_layers = 1;
    const auto r = param_count(cfg);
    REQUIRE(r.quantum_policy == 1 + (2 * 1 + 2));  // 5
}

TEST_CASE("param_count: quantum < classical for all small configs") {
    for (int obs = 1; obs <= 17; obs += 4) {
        for (int act = 1; act <= 6; ++act) {
            for (int layers = 1; layers <= 4; ++layers) {
                for (bool scaling : {false, true}) {
                    ReuploadingPolicyConfig cfg;
                    cfg.obs_dim = obs;
                    cfg.act_dim = act;
                    cfg.n_layers = layers;
                    cfg.use_input_scaling = scaling;
                    const auto r = param_count(cfg);
                    REQUIRE(r.quantum_policy < r.classical_baseline);
                }
            }
        }
    }
}

TEST_CASE("policy checkpoints round-trip and reject mismatched configs") {
    const auto cfg = small_cfg();
    const auto spec = build_reuploading_circuit(cfg);
    std::mt19937_64 rng(99);
    const auto params = init_policy_params(cfg, rng);

    const auto j = policy_checkpoint(cfg, spec, params);
    const auto back = load_policy_checkpoint(j, cfg);
    REQUIRE(back.circuit_params == params.circuit_params);
    REQUIRE(back.head_w == params.head_w);
    REQUIRE(back.head_b == params.head_b);

    auto other = cfg;
    other.n_layers = 3;
    REQUIRE_THROWS_AS(load_policy_checkpoint(j, other), UsageError);
}

TEST_CASE("config validation") {
    ReuploadingPolicyConfig cfg;
    cfg.obs_dim = 0;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
    cfg.obs_dim = 21;
    cfg.act_dim = 1;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);  // above simulator cap
}

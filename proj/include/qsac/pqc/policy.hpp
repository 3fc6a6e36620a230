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
 * Hybrid policy: a data re-uploading circuit whose per-qubit Z expectations
 * feed one affine head producing a squashed-Gaussian action distribution.
 *
 * Layer block layout, repeated n_layers times:
 *   encoder   — RX on every qubit, angle = (scale_{l,i} *) atan(obs_i)
 *   variation — RY on every qubit with its own trainable angle
 *   entangle  — CZ ring over (i, i+1 mod n_qubits), skipped for 1 qubit
 *
 * Trainable parameter layout per layer: [scales (if enabled)] then [RY angles].
 */
#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

#include "qsac/errors.hpp"
#include "qsac/nn/dense_net.hpp"
#include "qsac/qsim/circuit.hpp"
#include "qsac/qsim/gradient.hpp"

namespace qsac::pqc {

inline constexpr double kLogProbFloor = 1e-6;
inline constexpr int kBaselineHidden = 64;  // classical MLP comparison width

struct ReuploadingPolicyConfig {
    int obs_dim = 1;
    int act_dim = 1;
    int n_layers = 1;
    int n_qubits = 0;  // 0 means "same as obs_dim"
    bool use_input_scaling = false;
    double log_std_min = -5.0;
    double log_std_max = 2.0;

    [[nodiscard]] int qubits() const {
        return n_qubits > 0 ? n_qubits : obs_dim;
    }

    void validate() const {
        if (obs_dim < 1 || act_dim < 1 || n_layers < 1) {
            throw ConfigError("policy dims and layer count must be >= 1");
        }
        if (qubits() > qsim::kMaxQubits) {
            throw ConfigError("policy qubit count exceeds simulator cap");
        }
        if (qubits() != obs_dim) {
            throw ConfigError("qubit count must equal obs_dim (one feature per qubit)");
        }
        if (log_std_min >= log_std_max) {
            throw ConfigError("log_std bounds must satisfy min < max");
        }
    }

    [[nodiscard]] int n_circuit_params() const {
        return n_layers * qubits() * (use_input_scaling ? 2 : 1);
    }
};

inline qsim::CircuitSpec
build_reuploading_circuit(const ReuploadingPolicyConfig &cfg) {
    cfg.validate();
    const int nq = cfg.qubits();
    qsim::CircuitSpec spec;
    spec.n_qubits = nq;
    spec.n_features = nq;
    spec.n_trainable = cfg.n_circuit_params();
    const int per_layer = nq * (cfg.use_input_scaling ? 2 : 1);
    for (int layer = 0; layer < cfg.n_layers; ++layer) {
        const int base = layer * per_layer;
        for (int q = 0; q < nq; ++q) {
            qsim::Gate g;
            g.kind = qsim::GateKind::RX;
            g.target = q;
            g.angle = cfg.use_input_scaling
                          ? qsim::AngleSource::feature(q, base + q)
                          : qsim::AngleSource::feature(q);
            spec.gates.push_back(g);
        }
        const int var_base = base + (cfg.use_input_scaling ? nq : 0);
        for (int q = 0; q < nq; ++q) {
            qsim::Gate g;
            g.kind = qsim::GateKind::RY;
            g.target = q;
            g.angle = qsim::AngleSource::trainable(var_base + q);
            spec.gates.push_back(g);
        }
        if (nq > 1) {
            for (int q = 0; q < nq; ++q) {
                qsim::Gate g;
                g.kind = qsim::GateKind::CZ;
                g.control = q;
                g.target = (q + 1) % nq;
                if (nq == 2 && q == 1) {
                    break;  // a 2-qubit "ring" would repeat the same CZ
                }
                spec.gates.push_back(g);
            }
        }
    }
    spec.validate();
    return spec;
}

struct PolicyParams {
    std::vector<double> circuit_params;        // variational angles + scales
    std::vector<double> head_w;                // [2*act_dim x n_qubits], row-major
    std::vector<double> head_b;                // [2*act_dim]

    [[nodiscard]] std::size_t count() const {
        return circuit_params.size() + head_w.size() + head_b.size();
    }
};

inline PolicyParams init_policy_params(const ReuploadingPolicyConfig &cfg,
                                       std::mt19937_64 &rng) {
    cfg.validate();
    PolicyParams p;
    p.circuit_params.resize(static_cast<std::size_t>(cfg.n_circuit_params()));
    std::uniform_real_distribution<double> angle_dist(-std::numbers::pi,
                                                      std::numbers::pi);
    const int nq = cfg.qubits();
    const int per_layer = nq * (cfg.use_input_scaling ? 2 : 1);
    for (int layer = 0; layer < cfg.n_layers; ++layer) {
        const int base = layer * per_layer;
        if (cfg.use_input_scaling) {
            for (int q = 0; q < nq; ++q) {
                p.circuit_params[static_cast<std::size_t>(base + q)] = 1.0;
            }
        }
        const int var_base = base + (cfg.use_input_scaling ? nq : 0);
        for (int q = 0; q < nq; ++q) {
            p.circuit_params[static_cast<std::size_t>(var_base + q)] =
                angle_dist(rng);
        }
    }
    const double bound = std::sqrt(6.0 / nq);
    std::uniform_real_distribution<double> w_dist(-bound, bound);
    p.head_w.resize(static_cast<std::size_t>(2 * cfg.act_dim) * nq);
    for (auto &w : p.head_w) {
        w = w_dist(rng);
    }
    p.head_b.assign(static_cast<std::size_t>(2 * cfg.act_dim), 0.0);
    return p;
}

/// atan keeps unbounded joint velocities inside (-pi/2, pi/2) encoding angles.
inline std::vector<double> encode_features(std::span<const double> obs) {
    std::vector<double> f(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        f[i] = std::atan(obs[i]);
    }
    return f;
}

struct ForwardResult {
    std::vector<double> mu;            // [act_dim]
    std::vector<double> sigma;         // [act_dim]
    std::vector<double> log_std_pre;   // pre-clamp, for gradient masking
    std::vector<double> expectations;  // z in [-1, 1]^n_qubits
};

inline ForwardResult policy_forward(const ReuploadingPolicyConfig &cfg,
                                    const qsim::CircuitSpec &spec,
                                    const PolicyParams &params,
                                    std::span<const double> obs) {
    if (static_cast<int>(obs.size()) != cfg.obs_dim) {
        throw StructuralError("policy obs length mismatch");
    }
    const auto features = encode_features(obs);
    const auto state = qsim::run_circuit(spec, params.circuit_params, features);
    const auto obsv = qsim::ObservableSet::all_z(spec.n_qubits);

    ForwardResult r;
    r.expectations = qsim::expectations(state, obsv);
    const int nq = spec.n_qubits;
    const int out = 2 * cfg.act_dim;
    std::vector<double> h(static_cast<std::size_t>(out));
    for (int o = 0; o < out; ++o) {
        double acc = params.head_b[static_cast<std::size_t>(o)];
        for (int q = 0; q < nq; ++q) {
            acc += params.head_w[static_cast<std::size_t>(o) * nq + q] *
                   r.expectations[static_cast<std::size_t>(q)];
        }
        h[static_cast<std::size_t>(o)] = acc;
    }
    r.mu.assign(h.begin(), h.begin() + cfg.act_dim);
    r.log_std_pre.assign(h.begin() + cfg.act_dim, h.end());
    r.sigma.resize(static_cast<std::size_t>(cfg.act_dim));
    for (int d = 0; d < cfg.act_dim; ++d) {
        const double clamped =
            std::clamp(r.log_std_pre[static_cast<std::size_t>(d)],
                       cfg.log_std_min, cfg.log_std_max);
        r.sigma[static_cast<std::size_t>(d)] = std::exp(clamped);
    }
    return r;
}

/// Squashed-Gaussian log density with change-of-variables correction.
inline double log_prob(std::span<const double> mu, std::span<const double> sigma,
                       std::span<const double> pre_squash) {
    constexpr double half_ln_2pi = 0.91893853320467274178;
    double lp = 0.0;
    for (std::size_t d = 0; d < mu.size(); ++d) {
        const double z = (pre_squash[d] - mu[d]) / sigma[d];
        const double t = std::tanh(pre_squash[d]);
        lp += -std::log(sigma[d]) - half_ln_2pi - 0.5 * z * z -
              std::log(1.0 - t * t + kLogProbFloor);
    }
    return lp;
}

struct PolicyOutput {
    std::vector<double> mu;
    std::vector<double> sigma;
    std::vector<double> pre_squash;
    std::vector<double> action;  // tanh(pre_squash), in (-1, 1)
    double log_probability = 0.0;
};

inline PolicyOutput sample_action(std::span<const double> mu,
                                  std::span<const double> sigma,
                                  std::span<const double> noise) {
    PolicyOutput o;
    o.mu.assign(mu.begin(), mu.end());
    o.sigma.assign(sigma.begin(), sigma.end());
    o.pre_squash.resize(mu.size());
    o.action.resize(mu.size());
    for (std::size_t d = 0; d < mu.size(); ++d) {
        o.pre_squash[d] = mu[d] + sigma[d] * noise[d];
        o.action[d] = std::tanh(o.pre_squash[d]);
    }
    o.log_probability = log_prob(mu, sigma, o.pre_squash);
    return o;
}

struct PolicyGrads {
    std::vector<double> circuit_params;
    std::vector<double> head_w;
    std::vector<double> head_b;
};

inline PolicyGrads zero_policy_grads(const PolicyParams &params) {
    PolicyGrads g;
    g.circuit_params.assign(params.circuit_params.size(), 0.0);
    g.head_w.assign(params.head_w.size(), 0.0);
    g.head_b.assign(params.head_b.size(), 0.0);
    return g;
}

/// upstream = dLoss/d(mu ++ log_std_preclamp).  Entries for saturated log_std
/// components are zeroed by the clamp before any propagation.  Accumulates
/// into `out`.
inline void policy_gradient(const ReuploadingPolicyConfig &cfg,
                            const qsim::CircuitSpec &spec,
                            const PolicyParams &params,
                            std::span<const double> obs,
                            std::span<const double> upstream,
                            PolicyGrads &out) {
    if (static_cast<int>(upstream.size()) != 2 * cfg.act_dim) {
        throw StructuralError("upstream length must be 2*act_dim");
    }
    const auto fwd = policy_forward(cfg, spec, params, obs);
    const int nq = spec.n_qubits;
    const int n_out = 2 * cfg.act_dim;

    std::vector<double> up(upstream.begin(), upstream.end());
    for (int d = 0; d < cfg.act_dim; ++d) {
        const double pre = fwd.log_std_pre[static_cast<std::size_t>(d)];
        if (pre <= cfg.log_std_min || pre >= cfg.log_std_max) {
            up[static_cast<std::size_t>(cfg.act_dim + d)] = 0.0;
        }
    }

    std::vector<double> dz(static_cast<std::size_t>(nq), 0.0);
    for (int o = 0; o < n_out; ++o) {
        const double u = up[static_cast<std::size_t>(o)];
        out.head_b[static_cast<std::size_t>(o)] += u;
        for (int q = 0; q < nq; ++q) {
            out.head_w[static_cast<std::size_t>(o) * nq + q] +=
                u * fwd.expectations[static_cast<std::size_t>(q)];
            dz[static_cast<std::size_t>(q)] +=
                u * params.head_w[static_cast<std::size_t>(o) * nq + q];
        }
    }

    bool any = false;
    for (double v : dz) {
        if (v != 0.0) {
            any = true;
            break;
        }
    }
    if (!any) {
        return;  // skip 2*n_sites circuit evaluations when nothing flows back
    }

    const auto features = encode_features(obs);
    const auto obsv = qsim::ObservableSet::all_z(nq);
    const auto shift = qsim::parameter_shift_gradient(
        spec, params.circuit_params, features, obsv);
    for (int j = 0; j < spec.n_trainable; ++j) {
        double acc = 0.0;
        for (int q = 0; q < nq; ++q) {
            acc += dz[static_cast<std::size_t>(q)] * shift.at(q, j);
        }
        out.circuit_params[static_cast<std::size_t>(j)] += acc;
    }
}

struct ParamCountReport {
    std::size_t quantum_policy = 0;
    std::size_t classical_baseline = 0;
};

/// Quantum count vs the default classical-baseline MLP for the same dims.
inline ParamCountReport param_count(const ReuploadingPolicyConfig &cfg) {
    cfg.validate();
    ParamCountReport r;
    const int nq = cfg.qubits();
    r.quantum_policy = static_cast<std::size_t>(cfg.n_circuit_params()) +
                       static_cast<std::size_t>(2 * cfg.act_dim) * nq +
                       static_cast<std::size_t>(2 * cfg.act_dim);
    nn::DenseNet baseline(
        {cfg.obs_dim, kBaselineHidden, kBaselineHidden, 2 * cfg.act_dim});
    r.classical_baseline = baseline.param_count();
    return r;
}

// --- checkpoint ----------------------------------------------------------

inline void to_json(nlohmann::json &j, const ReuploadingPolicyConfig &cfg) {
    j = {{"obs_dim", cfg.obs_dim},
         {"act_dim", cfg.act_dim},
         {"n_layers", cfg.n_layers},
         {"n_qubits", cfg.qubits()},
         {"use_input_scaling", cfg.use_input_scaling},
         {"log_std_min", cfg.log_std_min},
         {"log_std_max", cfg.log_std_max}};
}

inline void from_json(const nlohmann::json &j, ReuploadingPolicyConfig &cfg) {
    j.at("obs_dim").get_to(cfg.obs_dim);
    j.at("act_dim").get_to(cfg.act_dim);
    j.at("n_layers").get_to(cfg.n_layers);
    j.at("n_qubits").get_to(cfg.n_qubits);
    j.at("use_input_scaling").get_to(cfg.use_input_scaling);
    j.at("log_std_min").get_to(cfg.log_std_min);
    j.at("log_std_max").get_to(cfg.log_std_max);
}

inline constexpr int kPolicyCheckpointVersion = 1;

inline nlohmann::json policy_checkpoint(const ReuploadingPolicyConfig &cfg,
                                        const qsim::CircuitSpec &spec,
                                        const PolicyParams &params) {
    return nlohmann::json{{"version", kPolicyCheckpointVersion},
                          {"config", cfg},
                          {"circuit", qsim::to_json(spec)},
                          {"circuit_params", params.circuit_params},
                          {"head_w", params.head_w},
                          {"head_b", params.head_b}};
}

inline PolicyParams load_policy_checkpoint(const nlohmann::json &j,
                                           const ReuploadingPolicyConfig &cfg) {
    if (j.at("version").get<int>() != kPolicyCheckpointVersion) {
        throw UsageError("unsupported policy checkpoint version");
    }
    ReuploadingPolicyConfig stored = j.at("config").get<ReuploadingPolicyConfig>();
    if (stored.obs_dim != cfg.obs_dim || stored.act_dim != cfg.act_dim ||
        stored.n_layers != cfg.n_layers || stored.qubits() != cfg.qubits() ||
        stored.use_input_scaling != cfg.use_input_scaling) {
        throw UsageError("policy checkpoint config mismatch");
    }
    PolicyParams p;
    j.at("circuit_params").get_to(p.circuit_params);
    j.at("head_w").get_to(p.head_w);
    j.at("head_b").get_to(p.head_b);
    if (p.circuit_params.size() !=
        static_cast<std::size_t>(cfg.n_circuit_params())) {
        throw UsageError("policy checkpoint parameter count mismatch");
    }
    return p;
}

} // namespace qsac::pqc

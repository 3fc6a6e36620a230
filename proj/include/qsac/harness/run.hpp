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
#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "qsac/envs/bridge.hpp"
#include "qsac/envs/hopper1d.hpp"
#include "qsac/envs/pendulum.hpp"
#include "qsac/harness/config.hpp"
#include "qsac/harness/metrics.hpp"
#include "qsac/sac/trainer.hpp"

namespace qsac::harness {

inline bool is_bridge_env(const std::string &name) {
    return name.rfind("bridge:", 0) == 0;
}

inline std::unique_ptr<envs::Env> make_env(const std::string &name) {
    if (name == "pendulum") {
        return std::make_unique<envs::PendulumEnv>();
    }
    if (name == "hopper1d") {
        return std::make_unique<envs::Hopper1DEnv>();
    }
    if (is_bridge_env(name)) {
        return std::make_unique<envs::BridgeEnv>(name.substr(7));
    }
    throw ConfigError("unknown environment: " + name);
}

inline std::unique_ptr<sac::PolicyBackend>
make_policy(const TrainConfig &cfg, const envs::EnvSpec &spec) {
    std::mt19937_64 init_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    if (cfg.algo == "classical-sac") {
        return std::make_unique<sac::ClassicalPolicy>(
            spec.obs_dim, spec.act_dim, cfg.sac.lr_actor, init_rng);
    }
    pqc::ReuploadingPolicyConfig pc = cfg.policy;
    pc.obs_dim = spec.obs_dim;
    pc.act_dim = spec.act_dim;
    if (pc.n_qubits == 0) {
        pc.n_qubits = spec.obs_dim;
    }
    pc.validate();
    return std::make_unique<sac::QuantumPolicy>(pc, cfg.sac.lr_actor, init_rng);
}

/// Deterministic-policy evaluation on a fresh env instance; mean return.
inline double evaluate_policy(sac::SacTrainer &trainer, const TrainConfig &cfg,
                              std::size_t eval_index) {
    auto env = make_env(cfg.env);
    const int cap = env->spec().max_episode_steps > 0
                        ? env->spec().max_episode_steps
                        : 1000;
    double total = 0.0;
    for (std::size_t ep = 0; ep < cfg.eval_episodes; ++ep) {
        const std::uint64_t eval_seed =
            cfg.seed * 1000003ULL + eval_index * 131ULL + ep;
        auto obs = env->reset(eval_seed);
        for (int t = 0; t < cap; ++t) {
            const auto unit = trainer.deterministic_action(obs);
            const auto action = envs::scale_action(env->spec(), unit);
            const auto r = env->step(action);
            total += r.reward;
            obs = r.obs;
            if (r.terminated || r.truncated) {
                break;
            }
        }
    }
    return total / static_cast<double>(cfg.eval_episodes);
}

/// Executes the full training run and returns the run directory.
inline std::filesystem::path run_training(const TrainConfig &cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    {
        std::ofstream probe(dir / ".write_probe");
        if (!probe) {
            throw UsageError("output directory is not writable: " + cfg.output_dir);
        }
    }
    fs::remove(dir / ".write_probe", ec);

    // Env connection failures surface here, before anything is trained.
    auto env = make_env(cfg.env);
    auto policy = make_policy(cfg, env->spec());
    const bool quantum = cfg.algo == "quantum-sac";

    {
        std::ofstream cf(dir / "config.json");
        cf << nlohmann::json(cfg).dump(2) << "\n";
    }

    sac::SacTrainer trainer(*env, std::move(policy), cfg.sac, cfg.seed);

    if (quantum) {
        const auto *qp =
            dynamic_cast<const sac::QuantumPolicy *>(&trainer.policy());
        std::ofstream circ(dir / "circuit.json");
        circ << qsim::to_json(qp->circuit()).dump(2) << "\n";
    }

    MetricsWriter metrics((dir / "metrics.csv").string());
    std::ofstream eval_out(dir / "eval.csv");
    eval_out << "cumulative_steps,mean_return\n";

    RollingReturn rolling;
    std::size_t episode = 0;
    std::size_t eval_index = 0;
    const bool do_eval = cfg.eval_every > 0 && !is_bridge_env(cfg.env);
    auto episode_start = std::chrono::steady_clock::now();

    for (std::size_t step = 0; step < cfg.total_steps; ++step) {
        const auto info = trainer.train_step();
        if (info.episode_done) {
            const auto now = std::chrono::steady_clock::now();
            const double secs =
                std::chrono::duration<double>(now - episode_start).count();
            episode_start = now;
            ++episode;
            EpisodeMetrics m;
            m.episode = episode;
            m.episode_return = info.episode_return;
            m.avg_return_20 = rolling.push(info.episode_return);
            m.steps = info.episode_length;
            m.cumulative_steps = info.total_env_steps;
            m.sps = secs > 0.0
                        ? static_cast<double>(info.episode_length) / secs
                        : 0.0;
            metrics.append(m);
        }
        if (do_eval && info.total_env_steps % cfg.eval_every == 0) {
            ++eval_index;
            const double mean_return = evaluate_policy(trainer, cfg, eval_index);
            eval_out << info.total_env_steps << ','
                     << format_double(mean_return) << "\n";
            eval_out.flush();
        }
    }

    {
        std::ofstream ck(dir / "checkpoint.json");
        ck << trainer.checkpoint().dump() << "\n";
    }
    return dir;
}

} // namespace qsac::harness

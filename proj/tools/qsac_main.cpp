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

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qsac/envs/server.hpp"
#include "qsac/harness/report.hpp"
#include "qsac/harness/run.hpp"
#include "qsac/pqc/policy.hpp"

namespace {

qsac::harness::TrainConfig load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw qsac::UsageError("cannot open config file: " + path);
    }
    nlohmann::json j;
    in >> j;
    return j.get<qsac::harness::TrainConfig>();
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"quantum/classical soft actor-critic toolkit"};
    app.require_subcommand(1);

    // train
    auto *train = app.add_subcommand("train", "run one training configuration");
    std::string config_path;
    qsac::harness::TrainConfig cfg;
    train->add_option("--config", config_path,
                      "JSON config file; flags below override its fields");
    train->add_option("--algo", cfg.algo, "classical-sac | quantum-sac");
    train->add_option("--env", cfg.env, "pendulum | hopper1d | bridge:host:port");
    train->add_option("--seed", cfg.seed, "master RNG seed");
    train->add_option("--total-steps", cfg.total_steps, "environment steps");
    train->add_option("--eval-every", cfg.eval_every,
                      "steps between deterministic evaluations (0 = off)");
    train->add_option("--eval-episodes", cfg.eval_episodes, "episodes per evaluation");
    train->add_option("--out", cfg.output_dir, "run output directory");
    train->add_option("--gamma", cfg.sac.gamma, "discount factor");
    train->add_option("--tau", cfg.sac.tau, "Polyak rate");
    train->add_option("--alpha", cfg.sac.alpha, "fixed entropy temperature");
    train->add_flag("--auto-alpha,!--fixed-alpha", cfg.sac.auto_alpha,
                    "automatic temperature tuning (default on)");
    train->add_option("--batch-size", cfg.sac.batch_size, "update batch size");
    train->add_option("--lr-actor", cfg.sac.lr_actor, "actor learning rate");
    train->add_option("--lr-critic", cfg.sac.lr_critic, "critic learning rate");
    train->add_option("--lr-alpha", cfg.sac.lr_alpha, "temperature learning rate");
    train->add_option("--start-steps", cfg.sac.start_steps, "uniform warmup steps");
    train->add_option("--update-every", cfg.sac.update_every, "steps per update");
    train->add_option("--capacity", cfg.sac.capacity, "replay capacity");
    train->add_option("--layers", cfg.policy.n_layers, "re-uploading layers (quantum)");
    train->add_flag("--input-scaling", cfg.policy.use_input_scaling,
                    "trainable per-feature input scales (quantum)");

    // summarize
    auto *summ = app.add_subcommand("summarize", "comparison table across runs");
    std::vector<std::string> run_dirs;
    std::string json_out;
    summ->add_option("runs", run_dirs, "run directories")->required();
    summ->add_option("--json", json_out, "also write a structured summary here");

    // plot-data
    auto *plot = app.add_subcommand("plot-data", "long-format CSVs for plotting");
    std::vector<std::string> plot_dirs;
    std::string plot_out = "plots";
    plot->add_option("runs", plot_dirs, "run directories")->required();
    plot->add_option("--out", plot_out, "output directory for data files");

    // serve-env-mock
    auto *serve = app.add_subcommand("serve-env-mock",
                                     "scripted bridge server for testing");
    int port = 7777;
    int mock_obs = 4;
    int mock_act = 2;
    std::uint64_t script_seed = 0;
    serve->add_option("--port", port, "TCP port (0 = pick a free one)");
    serve->add_option("--obs-dim", mock_obs, "served observation dimension");
    serve->add_option("--act-dim", mock_act, "served action dimension");
    serve->add_option("--script-seed", script_seed, "reward script seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            if (!config_path.empty()) {
                // start from the file, then flags given on the command line win
                qsac::harness::TrainConfig merged = load_config_file(config_path);
                auto copy_if_set = [&](const std::string &name, auto member) {
                    if (train->count(name) > 0) {
                        merged.*member = cfg.*member;
                    }
                };
                copy_if_set("--algo", &qsac::harness::TrainConfig::algo);
                copy_if_set("--env", &qsac::harness::TrainConfig::env);
                copy_if_set("--seed", &qsac::harness::TrainConfig::seed);
                copy_if_set("--total-steps", &qsac::harness::TrainConfig::total_steps);
                copy_if_set("--eval-every", &qsac::harness::TrainConfig::eval_every);
                copy_if_set("--eval-episodes", &qsac::harness::TrainConfig::eval_episodes);
                copy_if_set("--out", &qsac::harness::TrainConfig::output_dir);
                if (train->count("--gamma")) merged.sac.gamma = cfg.sac.gamma;
                if (train->count("--tau")) merged.sac.tau = cfg.sac.tau;
                if (train->count("--alpha")) merged.sac.alpha = cfg.sac.alpha;
                if (train->count("--batch-size")) merged.sac.batch_size = cfg.sac.batch_size;
                if (train->count("--lr-actor")) merged.sac.lr_actor = cfg.sac.lr_actor;
                if (train->count("--lr-critic")) merged.sac.lr_critic = cfg.sac.lr_critic;
                if (train->count("--lr-alpha")) merged.sac.lr_alpha = cfg.sac.lr_alpha;
                if (train->count("--start-steps")) merged.sac.start_steps = cfg.sac.start_steps;
                if (train->count("--update-every")) merged.sac.update_every = cfg.sac.update_every;
                if (train->count("--capacity")) merged.sac.capacity = cfg.sac.capacity;
                if (train->count("--auto-alpha") || train->count("--fixed-alpha")) {
                    merged.sac.auto_alpha = cfg.sac.auto_alpha;
                }
                if (train->count("--layers")) merged.policy.n_layers = cfg.policy.n_layers;
                if (train->count("--input-scaling")) {
                    merged.policy.use_input_scaling = cfg.policy.use_input_scaling;
                }
                cfg = merged;
            }
            const auto dir = qsac::harness::run_training(cfg);
            std::cout << "run written to " << dir.string() << "\n";
            if (cfg.algo == "quantum-sac") {
                qsac::pqc::ReuploadingPolicyConfig pc = cfg.policy;
                auto env = qsac::harness::make_env(cfg.env);
                pc.obs_dim = env->spec().obs_dim;
                pc.act_dim = env->spec().act_dim;
                if (pc.n_qubits == 0) {
                    pc.n_qubits = pc.obs_dim;
                }
                const auto counts = qsac::pqc::param_count(pc);
                std::cout << "learnable parameters: quantum policy "
                          << counts.quantum_policy << " vs classical baseline "
                          << counts.classical_baseline << "\n";
            }
            return 0;
        }
        if (*summ) {
            std::vector<std::filesystem::path> dirs(run_dirs.begin(), run_dirs.end());
            const auto runs = qsac::harness::summarize(dirs);
            std::cout << qsac::harness::render_summary_table(runs);
            if (!json_out.empty()) {
                std::ofstream out(json_out);
                out << qsac::harness::summary_json(runs).dump(2) << "\n";
            }
            for (const auto &r : runs) {
                if (!r.ok) {
                    std::cerr << "error in " << r.run << ": " << r.error << "\n";
                }
            }
            const bool any_fail = std::any_of(runs.begin(), runs.end(),
                                              [](const auto &r) { return !r.ok; });
            const bool all_fail = std::all_of(runs.begin(), runs.end(),
                                              [](const auto &r) { return !r.ok; });
            return all_fail ? 2 : (any_fail ? 1 : 0);
        }
        if (*plot) {
            std::vector<std::filesystem::path> dirs(plot_dirs.begin(),
                                                    plot_dirs.end());
            std::vector<qsac::harness::RunSummary> errors;
            qsac::harness::emit_plot_data(dirs, plot_out, &errors);
            for (const auto &e : errors) {
                std::cerr << "error in " << e.run << ": " << e.error << "\n";
            }
            std::cout << "plot data written to " << plot_out << "\n";
            return errors.empty() ? 0 : 1;
        }
        if (*serve) {
            qsac::envs::ScriptedMockEnv env(mock_obs, mock_act, script_seed);
            qsac::envs::BridgeListener listener(port);
            std::cout << "serving mock environment on 127.0.0.1:"
                      << listener.port() << std::endl;
            qsac::envs::serve_env(env, listener);
            return 0;
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

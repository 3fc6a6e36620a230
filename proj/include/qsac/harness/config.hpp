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

#include <string>

#include <json.hpp>

#include "qsac/pqc/policy.hpp"
#include "qsac/sac/trainer.hpp"

namespace qsac::harness {

/// Full run description; serialized into every run directory so any result
/// is reproducible from its config alone.
struct TrainConfig {
    std::string algo = "classical-sac";  // or "quantum-sac"
    std::string env = "pendulum";        // pendulum | hopper1d | bridge:host:port
    std::uint64_t seed = 0;
    std::size_t total_steps = 10000;
    std::size_t eval_every = 1000;  // 0 disables periodic evaluation
    std::size_t eval_episodes = 10;
    sac::SacHyperparams sac;
    pqc::ReuploadingPolicyConfig policy;  // quantum-sac only
    std::string output_dir = "run";

    void validate() const {
        if (algo != "classical-sac" && algo != "quantum-sac") {
            throw ConfigError("algo must be classical-sac or quantum-sac");
        }
        if (output_dir.empty()) {
            throw ConfigError("output_dir must be set");
        }
        sac.validate();
    }
};

inline void to_json(nlohmann::json &j, const TrainConfig &c) {
    j = {{"algo", c.algo},
         {"env", c.env},
         {"seed", c.seed},
         {"total_steps", c.total_steps},
         {"eval_every", c.eval_every},
         {"eval_episodes", c.eval_episodes},
         {"sac", c.sac},
         {"policy", c.policy},
         {"output_dir", c.output_dir}};
}

inline void from_json(const nlohmann::json &j, TrainConfig &c) {
    j.at("algo").get_to(c.algo);
    j.at("env").get_to(c.env);
    j.at("seed").get_to(c.seed);
    j.at("total_steps").get_to(c.total_steps);
    j.at("eval_every").get_to(c.eval_every);
    j.at("eval_episodes").get_to(c.eval_episodes);
    j.at("sac").get_to(c.sac);
    if (j.contains("policy")) {
        j.at("policy").get_to(c.policy);
    }
    j.at("output_dir").get_to(c.output_dir);
}

} // namespace qsac::harness

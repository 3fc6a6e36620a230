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

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "qsac/errors.hpp"

namespace qsac::envs {

struct EnvSpec {
    int obs_dim = 0;
    int act_dim = 0;
    std::vector<double> action_low;
    std::vector<double> action_high;
    int max_episode_steps = 0;  // 0 = unbounded

    void validate() const {
        if (obs_dim < 1 || act_dim < 1) {
            throw ConfigError("environment dims must be >= 1");
        }
        if (action_low.size() != static_cast<std::size_t>(act_dim) ||
            action_high.size() != static_cast<std::size_t>(act_dim)) {
            throw ConfigError("action bounds must have act_dim entries");
        }
        for (int d = 0; d < act_dim; ++d) {
            if (!(action_low[static_cast<std::size_t>(d)] <
                  action_high[static_cast<std::size_t>(d)])) {
                throw ConfigError("action_low must be < action_high");
            }
        }
    }
};

struct StepResult {
    std::vector<double> obs;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
};

/// Single-instance environment interface.  Actions arrive already in env
/// scale; policies act in (-1, 1) and go through scale_action below.
class Env {
  public:
    virtual ~Env() = default;
    [[nodiscard]] virtual const EnvSpec &spec() const = 0;
    virtual std::vector<double> reset(std::uint64_t seed) = 0;
    virtual StepResult step(std::span<const double> action) = 0;
};

/// Affine map from the policy's (-1, 1) range to [low, high] per dimension.
inline std::vector<double> scale_action(const EnvSpec &spec,
                                        std::span<const double> unit_action) {
    if (static_cast<int>(unit_action.size()) != spec.act_dim) {
        throw StructuralError("action length mismatch");
    }
    std::vector<double> out(unit_action.size());
    for (std::size_t d = 0; d < unit_action.size(); ++d) {
        const double lo = spec.action_low[d];
        const double hi = spec.action_high[d];
        out[d] = lo + (unit_action[d] + 1.0) * 0.5 * (hi - lo);
    }
    return out;
}

/// d(env action)/d(unit action), needed when critics differentiate actions.
inline std::vector<double> action_scale_jacobian(const EnvSpec &spec) {
    std::vector<double> out(static_cast<std::size_t>(spec.act_dim));
    for (int d = 0; d < spec.act_dim; ++d) {
        out[static_cast<std::size_t>(d)] =
            0.5 * (spec.action_high[static_cast<std::size_t>(d)] -
                   spec.action_low[static_cast<std::size_t>(d)]);
    }
    return out;
}

} // namespace qsac::envs

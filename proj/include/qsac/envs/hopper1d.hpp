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

#include <cmath>
#include <random>

#include "qsac/envs/env.hpp"

namespace qsac::envs {

/// Point-mass hopper: a sprung body height plus a driven forward velocity.
/// Reward is forward velocity minus a small control cost; the episode
/// terminates when the body height leaves [0.2, 2.0].
/// obs = (height - 1, vertical velocity, forward velocity, previous action).
class Hopper1DEnv final : public Env {
  public:
    static constexpr double kDt = 0.05;
    static constexpr double kSpring = 10.0;      // restoring toward height 1
    static constexpr double kLift = 20.0;        // action coupling into height
    static constexpr double kMinHeight = 0.2;
    static constexpr double kMaxHeight = 2.0;
    static constexpr int kMaxSteps = 200;

    Hopper1DEnv() {
        spec_.obs_dim = 4;
        spec_.act_dim = 1;
        spec_.action_low = {-1.0};
        spec_.action_high = {1.0};
        spec_.max_episode_steps = kMaxSteps;
    }

    [[nodiscard]] const EnvSpec &spec() const override { return spec_; }

    std::vector<double> reset(std::uint64_t seed) override {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> small(-0.05, 0.05);
        height_ = 1.0 + small(rng);
        v_height_ = small(rng);
        v_forward_ = small(rng);
        position_ = 0.0;
        prev_action_ = 0.0;
        injected_energy_ = 0.0;
        steps_ = 0;
        return observe();
    }

    StepResult step(std::span<const double> action) override {
        if (action.size() != 1) {
            throw StructuralError("hopper1d expects a scalar action");
        }
        const double a = std::clamp(action[0], -1.0, 1.0);

        // Symplectic Euler on both degrees of freedom.
        v_height_ += (-kSpring * (height_ - 1.0) + kLift * a) * kDt;
        height_ += v_height_ * kDt;
        v_forward_ += a * kDt;
        const double dx = v_forward_ * kDt;
        position_ += dx;
        injected_energy_ += a * dx;
        prev_action_ = a;
        ++steps_;

        StepResult r;
        r.obs = observe();
        r.reward = v_forward_ - 0.001 * a * a;
        r.terminated = height_ < kMinHeight || height_ > kMaxHeight;
        r.truncated = !r.terminated && steps_ >= kMaxSteps;
        return r;
    }

    [[nodiscard]] double height() const { return height_; }
    [[nodiscard]] double position() const { return position_; }
    /// Running sum of action * forward displacement, the work bookkeeping
    /// tests recompute from logged trajectories.
    [[nodiscard]] double injected_energy() const { return injected_energy_; }

  private:
    [[nodiscard]] std::vector<double> observe() const {
        return {height_ - 1.0, v_height_, v_forward_, prev_action_};
    }

    EnvSpec spec_;
    double height_ = 1.0;
    double v_height_ = 0.0;
    double v_forward_ = 0.0;
    double position_ = 0.0;
    double prev_action_ = 0.0;
    double injected_energy_ = 0.0;
    int steps_ = 0;
};

} // namespace qsac::envs

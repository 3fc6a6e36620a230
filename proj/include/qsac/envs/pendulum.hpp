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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qsac/envs/env.hpp"

namespace qsac::envs {

/// Classic torque-limited pendulum swing-up.  Never terminates; truncates
/// at 200 steps.  obs = (cos th, sin th, thdot).
class PendulumEnv final : public Env {
  public:
    static constexpr double kGravity = 10.0;
    static constexpr double kMass = 1.0;
    static constexpr double kLength = 1.0;
    static constexpr double kDt = 0.05;
    static constexpr double kMaxSpeed = 8.0;
    static constexpr double kMaxTorque = 2.0;
    static constexpr int kMaxSteps = 200;

    PendulumEnv() {
        spec_.obs_dim = 3;
        spec_.act_dim = 1;
        spec_.action_low = {-kMaxTorque};
        spec_.action_high = {kMaxTorque};
        spec_.max_episode_steps = kMaxSteps;
    }

    [[nodiscard]] const EnvSpec &spec() const override { return spec_; }

    std::vector<double> reset(std::uint64_t seed) override {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> th_dist(-std::numbers::pi,
                                                       std::numbers::pi);
        std::uniform_real_distribution<double> vel_dist(-1.0, 1.0);
        theta_ = th_dist(rng);
        theta_dot_ = vel_dist(rng);
        steps_ = 0;
        return observe();
    }

    StepResult step(std::span<const double> action) override {
        if (action.size() != 1) {
            throw StructuralError("pendulum expects a scalar action");
        }
        const double u = std::clamp(action[0], -kMaxTorque, kMaxTorque);

        // Cost on the pre-step state, matching the usual swing-up objective.
        const double cost = wrap_angle(theta_) * wrap_angle(theta_) +
                            0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u;

        const double acc =
            3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) +
            3.0 / (kMass * kLength * kLength) * u;
        theta_dot_ = std::clamp(theta_dot_ + acc * kDt, -kMaxSpeed, kMaxSpeed);
        theta_ += theta_dot_ * kDt;
        ++steps_;

        StepResult r;
        r.obs = observe();
        r.reward = -cost;
        r.terminated = false;
        r.truncated = steps_ >= kMaxSteps;
        return r;
    }

    /// Maps any angle into [-pi, pi); zero is upright.
    static double wrap_angle(double th) {
        const double two_pi = 2.0 * std::numbers::pi;
        th = std::fmod(th + std::numbers::pi, two_pi);
        if (th < 0.0) {
            th += two_pi;
        }
        return th - std::numbers::pi;
    }

    void set_state(double theta, double theta_dot) {
        theta_ = theta;
        theta_dot_ = theta_dot;
        steps_ = 0;
    }

    [[nodiscard]] double theta() const { return theta_; }
    [[nodiscard]] double theta_dot() const { return theta_dot_; }

  private:
    [[nodiscard]] std::vector<double> observe() const {
        return {std::cos(theta_), std::sin(theta_), theta_dot_};
    }

    EnvSpec spec_;
    double theta_ = 0.0;
    double theta_dot_ = 0.0;
    int steps_ = 0;
};

} // namespace qsac::envs

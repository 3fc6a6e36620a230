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
 * Server side of the JSON-lines bridge protocol, plus a scripted mock
 * environment used by the test suite and the serve-env-mock CLI verb.
 */
#pragma once

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstring>
#include <random>

#include <json.hpp>

#include "qsac/envs/bridge.hpp"
#include "qsac/envs/env.hpp"

namespace qsac::envs {

/// Deterministic environment with a scripted reward sequence drawn from a
/// seeded generator; clients can reproduce the exact sequence from the seed.
class ScriptedMockEnv final : public Env {
  public:
    explicit ScriptedMockEnv(int obs_dim = 4, int act_dim = 2,
                             std::uint64_t script_seed = 0) {
        spec_.obs_dim = obs_dim;
        spec_.act_dim = act_dim;
        spec_.action_low.assign(static_cast<std::size_t>(act_dim), -1.0);
        spec_.action_high.assign(static_cast<std::size_t>(act_dim), 1.0);
        spec_.max_episode_steps = 0;
        spec_.validate();
        script_seed_ = script_seed;
        reward_rng_.seed(script_seed);
    }

    [[nodiscard]] const EnvSpec &spec() const override { return spec_; }

    std::vector<double> reset(std::uint64_t seed) override {
        step_ = 0;
        reward_rng_.seed(script_seed_ ^ seed);
        return observe();
    }

    StepResult step(std::span<const double> action) override {
        if (static_cast<int>(action.size()) != spec_.act_dim) {
            throw StructuralError("mock env action length mismatch");
        }
        ++step_;
        StepResult r;
        r.obs = observe();
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        r.reward = dist(reward_rng_);
        r.terminated = false;
        r.truncated = false;
        return r;
    }

    /// The reward sequence a client will see after reset(seed).
    static std::vector<double> scripted_rewards(std::uint64_t script_seed,
                                                std::uint64_t reset_seed,
                                                std::size_t n) {
        std::mt19937_64 rng(script_seed ^ reset_seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        std::vector<double> out(n);
        for (auto &r : out) {
            r = dist(rng);
        }
        return out;
    }

  private:
    [[nodiscard]] std::vector<double> observe() const {
        std::vector<double> obs(static_cast<std::size_t>(spec_.obs_dim));
        for (int i = 0; i < spec_.obs_dim; ++i) {
            obs[static_cast<std::size_t>(i)] =
                std::sin(0.1 * static_cast<double>(step_ + i));
        }
        return obs;
    }

    EnvSpec spec_;
    std::uint64_t script_seed_ = 0;
    std::mt19937_64 reward_rng_;
    int step_ = 0;
};

/// Listening socket bound to 127.0.0.1; port 0 picks a free port.
class BridgeListener {
  public:
    explicit BridgeListener(int port) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0) {
            throw TransportError("cannot create listening socket");
        }
        int yes = 1;
        setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = htons(static_cast<std::uint16_t>(port));
        if (::bind(fd_, reinterpret_cast<sockaddr *>(&addr), sizeof(addr)) != 0 ||
            ::listen(fd_, 1) != 0) {
            ::close(fd_);
            throw TransportError("cannot bind bridge listener: " +
                                 std::string(std::strerror(errno)));
        }
        socklen_t len = sizeof(addr);
        getsockname(fd_, reinterpret_cast<sockaddr *>(&addr), &len);
        port_ = ntohs(addr.sin_port);
    }

    ~BridgeListener() {
        if (fd_ >= 0) {
            ::close(fd_);
        }
    }

    BridgeListener(const BridgeListener &) = delete;
    BridgeListener &operator=(const BridgeListener &) = delete;

    [[nodiscard]] int port() const { return port_; }

    LineSocket accept_one() {
        const int client = ::accept(fd_, nullptr, nullptr);
        if (client < 0) {
            throw TransportError("bridge accept failed");
        }
        return LineSocket(client);
    }

  private:
    int fd_ = -1;
    int port_ = 0;
};

/// Serve one client connection until it disconnects.  Malformed requests get
/// an error reply; the connection stays up so a client can observe it.
inline void serve_connection(Env &env, LineSocket &conn) {
    for (;;) {
        std::string line;
        try {
            line = conn.recv_line();
        } catch (const TransportError &) {
            return;  // client gone
        }
        nlohmann::json reply;
        try {
            nlohmann::json req = nlohmann::json::parse(line, nullptr, false);
            if (req.is_discarded() || !req.is_object() || !req.contains("cmd")) {
                reply = {{"error", "malformed request"}, {"line", line}};
            } else {
                const std::string cmd = req.at("cmd").get<std::string>();
                if (cmd == "spec") {
                    const EnvSpec &s = env.spec();
                    reply = {{"obs_dim", s.obs_dim},
                             {"act_dim", s.act_dim},
                             {"low", s.action_low},
                             {"high", s.action_high},
                             {"max_episode_steps", s.max_episode_steps}};
                } else if (cmd == "reset") {
                    reply = {{"obs", env.reset(req.value("seed", std::uint64_t{0}))}};
                } else if (cmd == "step") {
                    const auto action = req.at("action").get<std::vector<double>>();
                    const StepResult r = env.step(action);
                    reply = {{"obs", r.obs},
                             {"reward", r.reward},
                             {"terminated", r.terminated},
                             {"truncated", r.truncated}};
                } else {
                    reply = {{"error", "unknown cmd"}, {"cmd", cmd}};
                }
            }
        } catch (const std::exception &e) {
            reply = {{"error", e.what()}};
        }
        try {
            conn.send_line(reply.dump());
        } catch (const TransportError &) {
            return;
        }
    }
}

/// Accept-and-serve loop; `stop` ends the loop between connections.
inline void serve_env(Env &env, BridgeListener &listener,
                      const std::atomic<bool> *stop = nullptr) {
    while (!stop || !stop->load()) {
        LineSocket conn = listener.accept_one();
        serve_connection(env, conn);
    }
}

} // namespace qsac::envs

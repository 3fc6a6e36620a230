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
 * Wire-protocol bridge to external environment simulators.
 *
 * Protocol: UTF-8 JSON documents, one per line, '\n'-terminated, strict
 * request-reply with one request in flight:
 *   {"cmd":"spec"}                  -> {"obs_dim":..,"act_dim":..,"low":[..],"high":[..]}
 *   {"cmd":"reset","seed":n}        -> {"obs":[..]}
 *   {"cmd":"step","action":[..]}    -> {"obs":[..],"reward":r,"terminated":b,"truncated":b}
 */
#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <cstring>
#include <string>

#include <json.hpp>

#include "qsac/envs/env.hpp"

namespace qsac::envs {

/// Owning fd wrapper with line-buffered JSON reads.
class LineSocket {
  public:
    LineSocket() = default;
    explicit LineSocket(int fd) : fd_(fd) {}
    ~LineSocket() { close_fd(); }

    LineSocket(const LineSocket &) = delete;
    LineSocket &operator=(const LineSocket &) = delete;
    LineSocket(LineSocket &&other) noexcept
        : fd_(other.fd_), buffer_(std::move(other.buffer_)) {
        other.fd_ = -1;
    }
    LineSocket &operator=(LineSocket &&other) noexcept {
        if (this != &other) {
            close_fd();
            fd_ = other.fd_;
            buffer_ = std::move(other.buffer_);
            other.fd_ = -1;
        }
        return *this;
    }

    [[nodiscard]] bool open() const { return fd_ >= 0; }

    void set_timeout_seconds(int seconds) {
        timeval tv{};
        tv.tv_sec = seconds;
        setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
        setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
    }

    void send_line(const std::string &line) {
        std::string framed = line;
        framed.push_back('\n');
        std::size_t sent = 0;
        while (sent < framed.size()) {
            const ssize_t n =
                ::send(fd_, framed.data() + sent, framed.size() - sent, MSG_NOSIGNAL);
            if (n <= 0) {
                throw TransportError("bridge send failed: " +
                                     std::string(std::strerror(errno)));
            }
            sent += static_cast<std::size_t>(n);
        }
    }

    /// Blocks until a full line arrives; empty-on-EOF is a transport error.
    std::string recv_line() {
        for (;;) {
            const auto pos = buffer_.find('\n');
            if (pos != std::string::npos) {
                std::string line = buffer_.substr(0, pos);
                buffer_.erase(0, pos + 1);
                return line;
            }
            char chunk[4096];
            const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
            if (n == 0) {
                throw TransportError("bridge peer closed the connection");
            }
            if (n < 0) {
                if (errno == EAGAIN || errno == EWOULDBLOCK) {
                    throw TransportError("bridge receive timed out");
                }
                throw TransportError("bridge receive failed: " +
                                     std::string(std::strerror(errno)));
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

  private:
    void close_fd() {
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
    }

    int fd_ = -1;
    std::string buffer_;
};

inline nlohmann::json parse_protocol_line(const std::string &line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ProtocolError("malformed bridge line: " + line);
    }
    return j;
}

/// Environment served by a remote process speaking the JSON-lines protocol.
class BridgeEnv final : public Env {
  public:
    static constexpr int kDefaultTimeoutSeconds = 30;

    /// address is "host:port".
    explicit BridgeEnv(const std::string &address,
                       int timeout_seconds = kDefaultTimeoutSeconds) {
        const auto colon = address.rfind(':');
        if (colon == std::string::npos) {
            throw ConfigError("bridge address must be host:port, got " + address);
        }
        const std::string host = address.substr(0, colon);
        const std::string port = address.substr(colon + 1);

        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo *res = nullptr;
        if (getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0) {
            throw TransportError("cannot resolve bridge address " + address);
        }
        int fd = -1;
        for (addrinfo *p = res; p; p = p->ai_next) {
            fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
            if (fd < 0) {
                continue;
            }
            if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) {
                break;
            }
            ::close(fd);
            fd = -1;
        }
        freeaddrinfo(res);
        if (fd < 0) {
            throw TransportError("cannot connect to bridge at " + address);
        }
        socket_ = LineSocket(fd);
        socket_.set_timeout_seconds(timeout_seconds);

        const auto reply = request({{"cmd", "spec"}});
        try {
            spec_.obs_dim = reply.at("obs_dim").get<int>();
            spec_.act_dim = reply.at("act_dim").get<int>();
            spec_.action_low = reply.at("low").get<std::vector<double>>();
            spec_.action_high = reply.at("high").get<std::vector<double>>();
        } catch (const nlohmann::json::exception &e) {
            throw ProtocolError(std::string("bad spec reply: ") + e.what());
        }
        spec_.max_episode_steps = reply.value("max_episode_steps", 0);
        spec_.validate();
    }

    [[nodiscard]] const EnvSpec &spec() const override { return spec_; }

    std::vector<double> reset(std::uint64_t seed) override {
        const auto reply = request({{"cmd", "reset"}, {"seed", seed}});
        auto obs = extract_obs(reply);
        return obs;
    }

    StepResult step(std::span<const double> action) override {
        if (static_cast<int>(action.size()) != spec_.act_dim) {
            throw ContractError("bridge action length " +
                                std::to_string(action.size()) +
                                " != act_dim " + std::to_string(spec_.act_dim));
        }
        for (double a : action) {
            if (!std::isfinite(a)) {
                throw ContractError("non-finite value in bridge action");
            }
        }
        nlohmann::json req{{"cmd", "step"}};
        req["action"] = std::vector<double>(action.begin(), action.end());
        const auto reply = request(req);
        StepResult r;
        r.obs = extract_obs(reply);
        try {
            r.reward = reply.at("reward").get<double>();
            r.terminated = reply.at("terminated").get<bool>();
            r.truncated = reply.at("truncated").get<bool>();
        } catch (const nlohmann::json::exception &e) {
            throw ProtocolError(std::string("bad step reply: ") + e.what());
        }
        return r;
    }

  private:
    nlohmann::json request(const nlohmann::json &req) {
        socket_.send_line(req.dump());
        return parse_protocol_line(socket_.recv_line());
    }

    std::vector<double> extract_obs(const nlohmann::json &reply) const {
        std::vector<double> obs;
        try {
            obs = reply.at("obs").get<std::vector<double>>();
        } catch (const nlohmann::json::exception &e) {
            throw ProtocolError(std::string("bad obs in reply: ") + e.what());
        }
        if (static_cast<int>(obs.size()) != spec_.obs_dim) {
            throw ContractError("bridge obs length " + std::to_string(obs.size()) +
                                " != obs_dim " + std::to_string(spec_.obs_dim));
        }
        return obs;
    }

    LineSocket socket_;
    EnvSpec spec_;
};

} // namespace qsac::envs

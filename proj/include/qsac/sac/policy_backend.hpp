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
 * The trainer's view of an actor: classical MLP or quantum re-uploading
 * policy behind the same surface.  Only the gradient provider differs.
 */
#pragma once

#include <memory>
#include <span>

#include <json.hpp>

#include "qsac/nn/adam.hpp"
#include "qsac/nn/dense_net.hpp"
#include "qsac/pqc/policy.hpp"

namespace qsac::sac {

struct PolicyDist {
    std::vector<double> mu;
    std::vector<double> sigma;
    std::vector<double> log_std_pre;  // pre-clamp head output
};

class PolicyBackend {
  public:
    virtual ~PolicyBackend() = default;

    [[nodiscard]] virtual int act_dim() const = 0;
    [[nodiscard]] virtual PolicyDist forward(std::span<const double> obs) = 0;

    /// Gradient accumulation protocol: begin_update, any number of
    /// accumulate(obs, upstream) with upstream = dLoss/d(mu ++ log_std_pre)
    /// already averaged over the batch, then apply() for one Adam step.
    virtual void begin_update() = 0;
    virtual void accumulate(std::span<const double> obs,
                            std::span<const double> upstream) = 0;
    virtual void apply() = 0;

    [[nodiscard]] virtual std::size_t param_count() const = 0;
    [[nodiscard]] virtual nlohmann::json checkpoint() const = 0;
    virtual void restore(const nlohmann::json &j) = 0;
};

/// MLP(obs -> 64 -> 64 -> 2*act_dim) with the same log_std clamp semantics
/// as the quantum policy.
class ClassicalPolicy final : public PolicyBackend {
  public:
    ClassicalPolicy(int obs_dim, int act_dim, double lr, std::mt19937_64 &rng,
                    double log_std_min = -5.0, double log_std_max = 2.0,
                    std::vector<int> hidden = {64, 64})
        : act_dim_(act_dim), log_std_min_(log_std_min), log_std_max_(log_std_max) {
        std::vector<int> sizes{obs_dim};
        sizes.insert(sizes.end(), hidden.begin(), hidden.end());
        sizes.push_back(2 * act_dim);
        net_ = nn::DenseNet(sizes);
        net_.init_random(rng);
        adam_ = nn::Adam(net_.param_count(), lr);
    }

    [[nodiscard]] int act_dim() const override { return act_dim_; }

    [[nodiscard]] PolicyDist forward(std::span<const double> obs) override {
        const auto h = net_.forward(obs);
        return split(h);
    }

    void begin_update() override { grads_ = net_.zero_grads(); }

    void accumulate(std::span<const double> obs,
                    std::span<const double> upstream) override {
        nn::ForwardCache cache;
        const auto h = net_.forward(obs, &cache);
        std::vector<double> up(upstream.begin(), upstream.end());
        for (int d = 0; d < act_dim_; ++d) {
            const double pre = h[static_cast<std::size_t>(act_dim_ + d)];
            if (pre <= log_std_min_ || pre >= log_std_max_) {
                up[static_cast<std::size_t>(act_dim_ + d)] = 0.0;
            }
        }
        net_.backward(cache, up, grads_);
    }

    void apply() override {
        auto params = nn::flatten(net_.layers());
        const auto flat_grads = nn::flatten(grads_.layers);
        adam_.step(params, flat_grads);
        nn::unflatten(params, net_.layers());
    }

    [[nodiscard]] std::size_t param_count() const override {
        return net_.param_count();
    }

    [[nodiscard]] nlohmann::json checkpoint() const override {
        return {{"type", "classical"}, {"net", net_}, {"adam", adam_}};
    }

    void restore(const nlohmann::json &j) override {
        if (j.at("type") != "classical") {
            throw UsageError("checkpoint policy type mismatch");
        }
        j.at("net").get_to(net_);
        j.at("adam").get_to(adam_);
    }

    [[nodiscard]] nn::DenseNet &net() { return net_; }

  private:
    [[nodiscard]] PolicyDist split(const std::vector<double> &h) const {
        PolicyDist d;
        d.mu.assign(h.begin(), h.begin() + act_dim_);
        d.log_std_pre.assign(h.begin() + act_dim_, h.end());
        d.sigma.resize(static_cast<std::size_t>(act_dim_));
        for (int i = 0; i < act_dim_; ++i) {
            const double clamped =
                std::clamp(d.log_std_pre[static_cast<std::size_t>(i)],
                           log_std_min_, log_std_max_);
            d.sigma[static_cast<std::size_t>(i)] = std::exp(clamped);
        }
        return d;
    }

    int act_dim_;
    double log_std_min_;
    double log_std_max_;
    nn::DenseNet net_;
    nn::DenseNet::Grads grads_;
    nn::Adam adam_;
};

/// Data re-uploading circuit policy; gradients come from the parameter-shift
/// rule composed with the affine-head chain rule.
class QuantumPolicy final : public PolicyBackend {
  public:
    QuantumPolicy(pqc::ReuploadingPolicyConfig cfg, double lr,
                  std::mt19937_64 &rng)
        : cfg_(cfg), spec_(pqc::build_reuploading_circuit(cfg)),
          params_(pqc::init_policy_params(cfg, rng)),
          adam_(params_.count(), lr) {}

    [[nodiscard]] int act_dim() const override { return cfg_.act_dim; }
    [[nodiscard]] const pqc::ReuploadingPolicyConfig &config() const { return cfg_; }
    [[nodiscard]] const qsim::CircuitSpec &circuit() const { return spec_; }
    [[nodiscard]] const pqc::PolicyParams &params() const { return params_; }
    [[nodiscard]] pqc::PolicyParams &params() { return params_; }

    [[nodiscard]] PolicyDist forward(std::span<const double> obs) override {
        const auto fwd = pqc::policy_forward(cfg_, spec_, params_, obs);
        PolicyDist d;
        d.mu = fwd.mu;
        d.sigma = fwd.sigma;
        d.log_std_pre = fwd.log_std_pre;
        return d;
    }

    void begin_update() override { grads_ = pqc::zero_policy_grads(params_); }

    void accumulate(std::span<const double> obs,
                    std::span<const double> upstream) override {
        pqc::policy_gradient(cfg_, spec_, params_, obs, upstream, grads_);
    }

    void apply() override {
        std::vector<double> flat;
        flat.reserve(params_.count());
        flat.insert(flat.end(), params_.circuit_params.begin(),
                    params_.circuit_params.end());
        flat.insert(flat.end(), params_.head_w.begin(), params_.head_w.end());
        flat.insert(flat.end(), params_.head_b.begin(), params_.head_b.end());
        std::vector<double> g;
        g.reserve(params_.count());
        g.insert(g.end(), grads_.circuit_params.begin(), grads_.circuit_params.end());
        g.insert(g.end(), grads_.head_w.begin(), grads_.head_w.end());
        g.insert(g.end(), grads_.head_b.begin(), grads_.head_b.end());
        adam_.step(flat, g);
        std::size_t k = 0;
        for (auto &v : params_.circuit_params) {
            v = flat[k++];
        }
        for (auto &v : params_.head_w) {
            v = flat[k++];
        }
        for (auto &v : params_.head_b) {
            v = flat[k++];
        }
    }

    [[nodiscard]] std::size_t param_count() const override {
        return params_.count();
    }

    [[nodiscard]] nlohmann::json checkpoint() const override {
        nlohmann::json j = pqc::policy_checkpoint(cfg_, spec_, params_);
        j["type"] = "quantum";
        j["adam"] = adam_;
        return j;
    }

    void restore(const nlohmann::json &j) override {
        if (j.at("type") != "quantum") {
            throw UsageError("checkpoint policy type mismatch");
        }
        params_ = pqc::load_policy_checkpoint(j, cfg_);
        j.at("adam").get_to(adam_);
    }

  private:
    pqc::ReuploadingPolicyConfig cfg_;
    qsim::CircuitSpec spec_;
    pqc::PolicyParams params_;
    pqc::PolicyGrads grads_;
    nn::Adam adam_;
};

} // namespace qsac::sac

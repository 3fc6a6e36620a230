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
#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "qsac/errors.hpp"
#include "qsac/nn/dense_net.hpp"

namespace qsac::nn {

/// Bias-corrected Adam over a flat parameter vector.
class Adam {
  public:
    Adam() = default;
    Adam(std::size_t n_params, double lr, double beta1 = 0.9,
         double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
          m_(n_params, 0.0), v_(n_params, 0.0) {}

    void step(std::span<double> params, std::span<const double> grads) {
        if (params.size() != m_.size() || grads.size() != m_.size()) {
            throw StructuralError("Adam shape mismatch");
        }
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t i = 0; i < m_.size(); ++i) {
            const double g = grads[i];
            m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
            v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
            const double mhat = m_[i] / bc1;
            const double vhat = v_[i] / bc2;
            params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        }
    }

    [[nodiscard]] long step_count() const { return t_; }
    [[nodiscard]] double lr() const { return lr_; }

    friend void to_json(nlohmann::json &j, const Adam &a) {
        j = {{"lr", a.lr_}, {"beta1", a.beta1_}, {"beta2", a.beta2_},
             {"eps", a.eps_}, {"t", a.t_}, {"m", a.m_}, {"v", a.v_}};
    }
    friend void from_json(const nlohmann::json &j, Adam &a) {
        j.at("lr").get_to(a.lr_);
        j.at("beta1").get_to(a.beta1_);
        j.at("beta2").get_to(a.beta2_);
        j.at("eps").get_to(a.eps_);
        j.at("t").get_to(a.t_);
        j.at("m").get_to(a.m_);
        j.at("v").get_to(a.v_);
    }

  private:
    double lr_ = 3e-4;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
    long t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

/// Flatten helpers so nets and ad-hoc parameter blocks share one optimizer path.
inline std::vector<double> flatten(const std::vector<Layer> &layers) {
    std::vector<double> out;
    for (const auto &l : layers) {
        out.insert(out.end(), l.w.begin(), l.w.end());
        out.insert(out.end(), l.b.begin(), l.b.end());
    }
    return out;
}

inline void unflatten(std::span<const double> flat, std::vector<Layer> &layers) {
    std::size_t k = 0;
    for (auto &l : layers) {
        for (auto &w : l.w) {
            w = flat[k++];
        }
        for (auto &b : l.b) {
            b = flat[k++];
        }
    }
    if (k != flat.size()) {
        throw StructuralError("unflatten size mismatch");
    }
}

} // namespace qsac::nn

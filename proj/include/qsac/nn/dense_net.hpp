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
 * Minimal dense feed-forward net: affine layers, ReLU on hidden layers,
 * identity on the output, exact reverse-mode gradients.
 */
#pragma once

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include <json.hpp>

#include "qsac/errors.hpp"

namespace qsac::nn {

/// Per-layer weights stored row-major: w[out][in].
struct Layer {
    int in = 0;
    int out = 0;
    std::vector<double> w;
    std::vector<double> b;
};

struct ForwardCache {
    std::vector<std::vector<double>> pre;   // pre-activation per layer
    std::vector<std::vector<double>> post;  // post-activation per layer (post[0] = input)
};

class DenseNet {
  public:
    DenseNet() = default;

    /// layer_sizes: input -> hidden... -> output.  ReLU on hidden layers.
    explicit DenseNet(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
        if (sizes_.size() < 2) {
            throw StructuralError("DenseNet needs at least input and output sizes");
        }
        for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
            Layer l;
            l.in = sizes_[i];
            l.out = sizes_[i + 1];
            l.w.assign(static_cast<std::size_t>(l.in) * l.out, 0.0);
            l.b.assign(static_cast<std::size_t>(l.out), 0.0);
            layers_.push_back(std::move(l));
        }
    }

    /// He-style uniform init on weights, zero biases.
    void init_random(std::mt19937_64 &rng) {
        for (auto &l : layers_) {
            const double bound = std::sqrt(6.0 / l.in);
            std::uniform_real_distribution<double> dist(-bound, bound);
            for (auto &w : l.w) {
                w = dist(rng);
            }
            std::fill(l.b.begin(), l.b.end(), 0.0);
        }
    }

    [[nodiscard]] const std::vector<int> &layer_sizes() const { return sizes_; }
    [[nodiscard]] std::vector<Layer> &layers() { return layers_; }
    [[nodiscard]] const std::vector<Layer> &layers() const { return layers_; }

    [[nodiscard]] std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto &l : layers_) {
            n += l.w.size() + l.b.size();
        }
        return n;
    }

    [[nodiscard]] std::vector<double> forward(std::span<const double> input,
                                              ForwardCache *cache = nullptr) const {
        if (static_cast<int>(input.size()) != sizes_.front()) {
            throw StructuralError("DenseNet input size mismatch");
        }
        std::vector<double> x(input.begin(), input.end());
        if (cache) {
            cache->pre.clear();
            cache->post.clear();
            cache->post.push_back(x);
        }
        for (std::size_t li = 0; li < layers_.size(); ++li) {
            const Layer &l = layers_[li];
            std::vector<double> y(static_cast<std::size_t>(l.out));
            for (int o = 0; o < l.out; ++o) {
                double acc = l.b[static_cast<std::size_t>(o)];
                const double *wrow = &l.w[static_cast<std::size_t>(o) * l.in];
                for (int i = 0; i < l.in; ++i) {
                    acc += wrow[i] * x[static_cast<std::size_t>(i)];
                }
                y[static_cast<std::size_t>(o)] = acc;
            }
            if (cache) {
                cache->pre.push_back(y);
            }
            const bool hidden = li + 1 < layers_.size();
            if (hidden) {
                for (auto &v : y) {
                    v = v > 0.0 ? v : 0.0;
                }
            }
            if (cache) {
                cache->post.push_back(y);
            }
            x = std::move(y);
        }
        return x;
    }

    struct Grads {
        std::vector<Layer> layers;  // same shapes as the net's layers
        std::vector<double> input;

        void add_scaled(const Grads &other, double s) {
            for (std::size_t li = 0; li < layers.size(); ++li) {
                for (std::size_t i = 0; i < layers[li].w.size(); ++i) {
                    layers[li].w[i] += s * other.layers[li].w[i];
                }
                for (std::size_t i = 0; i < layers[li].b.size(); ++i) {
                    layers[li].b[i] += s * other.layers[li].b[i];
                }
            }
        }
    };

    [[nodiscard]] Grads zero_grads() const {
        Grads g;
        for (const auto &l : layers_) {
            Layer gl;
            gl.in = l.in;
            gl.out = l.out;
            gl.w.assign(l.w.size(), 0.0);
            gl.b.assign(l.b.size(), 0.0);
            g.layers.push_back(std::move(gl));
        }
        g.input.assign(static_cast<std::size_t>(sizes_.front()), 0.0);
        return g;
    }

    /// Accumulates parameter gradients into `out` and returns via out.input
    /// the gradient w.r.t. the network input.  ReLU passes gradient iff the
    /// pre-activation is strictly positive.
    void backward(const ForwardCache &cache, std::span<const double> upstream,
                  Grads &out) const {
        if (cache.pre.size() != layers_.size() ||
            cache.post.size() != layers_.size() + 1) {
            throw StructuralError("forward cache does not match this net");
        }
        for (std::size_t li = 0; li < layers_.size(); ++li) {
            if (cache.post[li].size() != static_cast<std::size_t>(layers_[li].in) ||
                cache.pre[li].size() != static_cast<std::size_t>(layers_[li].out)) {
                throw StructuralError("forward cache does not match this net");
            }
        }
        if (static_cast<int>(upstream.size()) != sizes_.back()) {
            throw StructuralError("upstream size mismatch");
        }
        std::vector<double> delta(upstream.begin(), upstream.end());
        for (std::size_t li = layers_.size(); li-- > 0;) {
            const Layer &l = layers_[li];
            const auto &x = cache.post[li];
            const bool hidden = li + 1 < layers_.size();
            if (hidden) {
                const auto &pre = cache.pre[li];
                for (int o = 0; o < l.out; ++o) {
                    if (pre[static_cast<std::size_t>(o)] <= 0.0) {
                        delta[static_cast<std::size_t>(o)] = 0.0;
                    }
                }
            }
            Layer &gl = out.layers[li];
            std::vector<double> next_delta(static_cast<std::size_t>(l.in), 0.0);
            for (int o = 0; o < l.out; ++o) {
                const double d = delta[static_cast<std::size_t>(o)];
                gl.b[static_cast<std::size_t>(o)] += d;
                double *gw = &gl.w[static_cast<std::size_t>(o) * l.in];
                const double *wrow = &l.w[static_cast<std::size_t>(o) * l.in];
                for (int i = 0; i < l.in; ++i) {
                    gw[i] += d * x[static_cast<std::size_t>(i)];
                    next_delta[static_cast<std::size_t>(i)] += d * wrow[i];
                }
            }
            delta = std::move(next_delta);
        }
        for (std::size_t i = 0; i < delta.size(); ++i) {
            out.input[i] += delta[i];
        }
    }

    friend void to_json(nlohmann::json &j, const DenseNet &net) {
        j["layer_sizes"] = net.sizes_;
        nlohmann::json jl = nlohmann::json::array();
        for (const auto &l : net.layers_) {
            jl.push_back({{"w", l.w}, {"b", l.b}});
        }
        j["layers"] = jl;
    }

    friend void from_json(const nlohmann::json &j, DenseNet &net) {
        net = DenseNet(j.at("layer_sizes").get<std::vector<int>>());
        const auto &jl = j.at("layers");
        for (std::size_t i = 0; i < net.layers_.size(); ++i) {
            auto w = jl.at(i).at("w").get<std::vector<double>>();
            auto b = jl.at(i).at("b").get<std::vector<double>>();
            if (w.size() != net.layers_[i].w.size() ||
                b.size() != net.layers_[i].b.size()) {
                throw UsageError("checkpoint layer shape mismatch");
            }
            net.layers_[i].w = std::move(w);
            net.layers_[i].b = std::move(b);
        }
    }

  private:
    std::vector<int> sizes_;
    std::vector<Layer> layers_;
};

} // namespace qsac::nn

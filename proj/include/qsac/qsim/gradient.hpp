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
 * Analytic parameter-shift gradients of Pauli-Z expectations.
 *
 * Every angle enters through exp(-i theta P / 2), so the exact rule
 *   d<O>/d(angle) = [<O>(angle + pi/2) - <O>(angle - pi/2)] / 2
 * applies at each gate site.  A trainable parameter shared across sites
 * accumulates additively; a scale parameter feeding angle = scale * feature
 * picks up the chain factor d(angle)/d(scale) = feature.
 */
#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "qsac/qsim/circuit.hpp"

namespace qsac::qsim {

/// Row-major [n_observables x n_trainable] matrix.
struct GradientMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    double &at(int r, int c) {
        return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                    static_cast<std::size_t>(c)];
    }
    [[nodiscard]] double at(int r, int c) const {
        return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                    static_cast<std::size_t>(c)];
    }
};

inline GradientMatrix parameter_shift_gradient(const CircuitSpec &spec,
                                               std::span<const double> params,
                                               std::span<const double> features,
                                               const ObservableSet &obs) {
    const int n_obs = static_cast<int>(obs.z_qubits.size());
    GradientMatrix grad;
    grad.rows = n_obs;
    grad.cols = spec.n_trainable;
    grad.data.assign(
        static_cast<std::size_t>(n_obs) * static_cast<std::size_t>(spec.n_trainable),
        0.0);

    constexpr double half_pi = std::numbers::pi / 2.0;
    StateVector plus(spec.n_qubits);
    StateVector minus(spec.n_qubits);

    for (std::size_t site = 0; site < spec.gates.size(); ++site) {
        const Gate &g = spec.gates[site];
        if (g.kind == GateKind::CZ) {
            continue;
        }
        int param = -1;
        double chain = 1.0;
        if (g.angle.kind == AngleSource::Kind::TrainableParam) {
            param = g.angle.param_index;
        } else if (g.angle.kind == AngleSource::Kind::DataFeature &&
                   g.angle.param_index >= 0) {
            param = g.angle.param_index;
            chain = features[static_cast<std::size_t>(g.angle.feature_index)];
        }
        if (param < 0) {
            continue;
        }
        run_circuit_into(plus, spec, params, features,
                         static_cast<std::ptrdiff_t>(site), half_pi);
        run_circuit_into(minus, spec, params, features,
                         static_cast<std::ptrdiff_t>(site), -half_pi);
        for (int k = 0; k < n_obs; ++k) {
            const int q = obs.z_qubits[static_cast<std::size_t>(k)];
            const double d =
                (plus.expectation_z(q) - minus.expectation_z(q)) / 2.0;
            grad.at(k, param) += chain * d;
        }
    }
    return grad;
}

} // namespace qsac::qsim

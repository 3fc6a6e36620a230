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
 * Parameterized circuits over the {RX, RY, RZ, CZ} gate set, with angle
 * bindings that distinguish constants, trainable parameters, and data
 * features (optionally scaled by a trainable parameter).
 */
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsac/errors.hpp"
#include "qsac/qsim/state_vector.hpp"

namespace qsac::qsim {

enum class GateKind { RX, RY, RZ, CZ };

/// Where a gate's angle comes from when the circuit is evaluated.
struct AngleSource {
    enum class Kind { Constant, TrainableParam, DataFeature };

    Kind kind = Kind::Constant;
    double value = 0.0;  // Constant only
    int param_index = -1;  // TrainableParam, or the scale of a DataFeature
    int feature_index = -1;  // DataFeature only

    static AngleSource constant(double v) {
        return {Kind::Constant, v, -1, -1};
    }
    static AngleSource trainable(int index) {
        return {Kind::TrainableParam, 0.0, index, -1};
    }
    /// angle = feature[index], or scale_param * feature[index] when a scale
    /// parameter index is given.
    static AngleSource feature(int index, std::optional<int> scale_param = {}) {
        return {Kind::DataFeature, 0.0, scale_param.value_or(-1), index};
    }
};

struct Gate {
    GateKind kind = GateKind::RX;
    int target = 0;
    int control = -1;  // CZ only; CZ is symmetric so the naming is nominal
    AngleSource angle;
};

/// Ordered gate list with parameter bookkeeping.  Evaluation is deterministic:
/// identical (params, features) inputs reproduce identical amplitudes.
struct CircuitSpec {
    int n_qubits = 1;
    std::vector<Gate> gates;
    int n_trainable = 0;
    int n_features = 0;

    void validate() const {
        if (n_qubits < 1 || n_qubits > kMaxQubits) {
            throw ConfigError("circuit n_qubits out of range");
        }
        for (const auto &g : gates) {
            if (g.target < 0 || g.target >= n_qubits) {
                throw StructuralError("gate target out of range");
            }
            if (g.kind == GateKind::CZ) {
                if (g.control < 0 || g.control >= n_qubits ||
                    g.control == g.target) {
                    throw StructuralError("CZ control out of range");
                }
            } else {
                switch (g.angle.kind) {
                case AngleSource::Kind::Constant:
                    break;
                case AngleSource::Kind::TrainableParam:
                    if (g.angle.param_index < 0 ||
                        g.angle.param_index >= n_trainable) {
                        throw StructuralError("trainable index out of range");
                    }
                    break;
                case AngleSource::Kind::DataFeature:
                    if (g.angle.feature_index < 0 ||
                        g.angle.feature_index >= n_features) {
                        throw StructuralError("feature index out of range");
                    }
                    if (g.angle.param_index >= n_trainable) {
                        throw StructuralError("scale index out of range");
                    }
                    break;
                }
            }
        }
    }
};

/// Resolve the angle a gate contributes given current params and features.
inline double resolve_angle(const Gate &g, std::span<const double> params,
                            std::span<const double> features) {
    switch (g.angle.kind) {
    case AngleSource::Kind::Constant:
        return g.angle.value;
    case AngleSource::Kind::TrainableParam:
        return params[static_cast<std::size_t>(g.angle.param_index)];
    case AngleSource::Kind::DataFeature: {
        const double f = features[static_cast<std::size_t>(g.angle.feature_index)];
        if (g.angle.param_index >= 0) {
            return params[static_cast<std::size_t>(g.angle.param_index)] * f;
        }
        return f;
    }
    }
    throw StructuralError("unreachable angle source");
}

inline void apply_gate(StateVector &state, const Gate &g, double angle) {
    switch (g.kind) {
    case GateKind::RX:
        state.apply_rx(g.target, angle);
        break;
    case GateKind::RY:
        state.apply_ry(g.target, angle);
        break;
    case GateKind::RZ:
        state.apply_rz(g.target, angle);
        break;
    case GateKind::CZ:
        state.apply_cz(g.control, g.target);
        break;
    }
}

/// Evolve |0...0> through the full gate list.  `extra_angle_offset`, when
/// non-negative, adds `shift` to the resolved angle of that one gate site;
/// this is the hook the parameter-shift rule uses.
inline void run_circuit_into(StateVector &state, const CircuitSpec &spec,
                             std::span<const double> params,
                             std::span<const double> features,
                             std::ptrdiff_t shifted_site = -1,
                             double shift = 0.0) {
    if (static_cast<int>(params.size()) != spec.n_trainable) {
        throw StructuralError("params length " + std::to_string(params.size()) +
                              " != n_trainable " +
                              std::to_string(spec.n_trainable));
    }
    if (static_cast<int>(features.size()) != spec.n_features) {
        throw StructuralError("features length " +
                              std::to_string(features.size()) +
                              " != n_features " +
                              std::to_string(spec.n_features));
    }
    state.reset();
    for (std::size_t i = 0; i < spec.gates.size(); ++i) {
        const Gate &g = spec.gates[i];
        double angle = 0.0;
        if (g.kind != GateKind::CZ) {
            angle = resolve_angle(g, params, features);
            if (static_cast<std::ptrdiff_t>(i) == shifted_site) {
                angle += shift;
            }
        }
        apply_gate(state, g, angle);
    }
}

inline StateVector run_circuit(const CircuitSpec &spec,
                               std::span<const double> params,
                               std::span<const double> features) {
    StateVector state(spec.n_qubits);
    run_circuit_into(state, spec, params, features);
    return state;
}

/// Single-qubit Pauli-Z measurements, one per listed qubit.
struct ObservableSet {
    std::vector<int> z_qubits;

    static ObservableSet all_z(int n_qubits) {
        ObservableSet obs;
        obs.z_qubits.resize(static_cast<std::size_t>(n_qubits));
        for (int q = 0; q < n_qubits; ++q) {
            obs.z_qubits[static_cast<std::size_t>(q)] = q;
        }
        return obs;
    }
};

inline std::vector<double> expectations(const StateVector &state,
                                        const ObservableSet &obs) {
    std::vector<double> out;
    out.reserve(obs.z_qubits.size());
    for (int q : obs.z_qubits) {
        out.push_back(state.expectation_z(q));
    }
    return out;
}

// --- serialization -------------------------------------------------------

inline const char *gate_kind_name(GateKind k) {
    switch (k) {
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CZ: return "CZ";
    }
    return "?";
}

inline GateKind gate_kind_from_name(const std::string &s) {
    if (s == "RX") return GateKind::RX;
    if (s == "RY") return GateKind::RY;
    if (s == "RZ") return GateKind::RZ;
    if (s == "CZ") return GateKind::CZ;
    throw StructuralError("unknown gate kind: " + s);
}

inline nlohmann::json to_json(const CircuitSpec &spec) {
    nlohmann::json gates = nlohmann::json::array();
    for (const auto &g : spec.gates) {
        nlohmann::json jg;
        jg["kind"] = gate_kind_name(g.kind);
        jg["target"] = g.target;
        if (g.kind == GateKind::CZ) {
            jg["control"] = g.control;
        } else {
            nlohmann::json src;
            switch (g.angle.kind) {
            case AngleSource::Kind::Constant:
                src["type"] = "constant";
                src["value"] = g.angle.value;
                break;
            case AngleSource::Kind::TrainableParam:
                src["type"] = "trainable";
                src["index"] = g.angle.param_index;
                break;
            case AngleSource::Kind::DataFeature:
                src["type"] = "feature";
                src["index"] = g.angle.feature_index;
                if (g.angle.param_index >= 0) {
                    src["scale_index"] = g.angle.param_index;
                }
                break;
            }
            jg["angle_source"] = src;
        }
        gates.push_back(jg);
    }
    return nlohmann::json{{"n_qubits", spec.n_qubits},
                          {"n_trainable", spec.n_trainable},
                          {"n_features", spec.n_features},
                          {"gates", gates}};
}

inline CircuitSpec circuit_from_json(const nlohmann::json &j) {
    CircuitSpec spec;
    spec.n_qubits = j.at("n_qubits").get<int>();
    spec.n_trainable = j.at("n_trainable").get<int>();
    spec.n_features = j.at("n_features").get<int>();
    for (const auto &jg : j.at("gates")) {
        Gate g;
        g.kind = gate_kind_from_name(jg.at("kind").get<std::string>());
        g.target = jg.at("target").get<int>();
        if (g.kind == GateKind::CZ) {
            g.control = jg.at("control").get<int>();
        } else {
            const auto &src = jg.at("angle_source");
            const std::string type = src.at("type").get<std::string>();
            if (type == "constant") {
                g.angle = AngleSource::constant(src.at("value").get<double>());
            } else if (type == "trainable") {
                g.angle = AngleSource::trainable(src.at("index").get<int>());
            } else if (type == "feature") {
                std::optional<int> scale;
                if (src.contains("scale_index")) {
                    scale = src.at("scale_index").get<int>();
                }
                g.angle = AngleSource::feature(src.at("index").get<int>(), scale);
            } else {
                throw StructuralError("unknown angle source type: " + type);
            }
        }
        spec.gates.push_back(g);
    }
    spec.validate();
    return spec;
}

} // namespace qsac::qsim

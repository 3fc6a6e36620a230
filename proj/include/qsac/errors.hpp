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

#include <stdexcept>
#include <string>

namespace qsac {

/// Bad user-supplied configuration (out-of-range qubit counts, invalid dims).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Internal shape/index violations (mismatched vector lengths, bad qubit index).
struct StructuralError : std::runtime_error {
    explicit StructuralError(const std::string &msg) : std::runtime_error(msg) {}
};

/// API misuse (sampling an empty buffer, loading a mismatched checkpoint).
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Malformed message on the environment bridge.
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Socket-level bridge failures (connect, timeout, disconnect).
struct TransportError : std::runtime_error {
    explicit TransportError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Bridge peer violated the negotiated environment spec (dim mismatch, NaN action).
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace qsac

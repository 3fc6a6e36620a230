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
 * Dense statevector storage and single/two-qubit gate kernels.
 *
 * Amplitude ordering is little-endian: basis index b stores qubit q in
 * bit q of b.  |q1 q0> = |10> therefore lives at index 2.
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qsac/errors.hpp"

namespace qsac::qsim {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 20; // 2^20 amplitudes, ~16 MiB

/// 2^n_qubits complex amplitudes of an n-qubit register.
class StateVector {
  public:
    explicit StateVector(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 1 || n_qubits > kMaxQubits) {
            throw ConfigError("n_qubits must be in [1, " +
                              std::to_string(kMaxQubits) + "], got " +
                              std::to_string(n_qubits));
        }
        amplitudes_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
        amplitudes_[0] = Complex{1.0, 0.0};
    }

    [[nodiscard]] int num_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t size() const { return amplitudes_.size(); }

    [[nodiscard]] const std::vector<Complex> &amplitudes() const {
        return amplitudes_;
    }
    [[nodiscard]] std::vector<Complex> &amplitudes() { return amplitudes_; }

    [[nodiscard]] double norm_sq() const {
        double s = 0.0;
        for (const auto &a : amplitudes_) {
            s += std::norm(a);
        }
        return s;
    }

    /// Reset to |0...0>.
    void reset() {
        std::fill(amplitudes_.begin(), amplitudes_.end(), Complex{0.0, 0.0});
        amplitudes_[0] = Complex{1.0, 0.0};
    }

    void check_qubit(int q) const {
        if (q < 0 || q >= n_qubits_) {
            throw StructuralError("qubit index " + std::to_string(q) +
                                  " out of range for " +
                                  std::to_string(n_qubits_) + " qubits");
        }
    }

    /// Apply a generic 2x2 unitary [[u00, u01], [u10, u11]] on qubit `target`.
    void apply_single(int target, Complex u00, Complex u01, Complex u10,
                      Complex u11) {
        check_qubit(target);
        const std::size_t stride = std::size_t{1} << target;
        const std::size_t n = amplitudes_.size();
        for (std::size_t base = 0; base < n; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                const Complex a0 = amplitudes_[i];
                const Complex a1 = amplitudes_[i + stride];
                amplitudes_[i] = u00 * a0 + u01 * a1;
                amplitudes_[i + stride] = u10 * a0 + u11 * a1;
            }
        }
    }

    // Rotation convention: R_P(theta) = exp(-i theta P / 2).

    void apply_rx(int target, double theta) {
        const double c = std::cos(theta / 2.0);
        const double s = std::sin(theta / 2.0);
        apply_single(target, {c, 0.0}, {0.0, -s}, {0.0, -s}, {c, 0.0});
    }

    void apply_ry(int target, double theta) {
        const double c = std::cos(theta / 2.0);
        const double s = std::sin(theta / 2.0);
        apply_single(target, {c, 0.0}, {-s, 0.0}, {s, 0.0}, {c, 0.0});
    }

    void apply_rz(int target, double theta) {
        check_qubit(target);
        const Complex p0{std::cos(theta / 2.0), -std::sin(theta / 2.0)};
        const Complex p1 = std::conj(p0);
        const std::size_t stride = std::size_t{1} << target;
        const std::size_t n = amplitudes_.size();
        for (std::size_t base = 0; base < n; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                amplitudes_[i] *= p0;
                amplitudes_[i + stride] *= p1;
            }
        }
    }

    /// CZ is symmetric; negates amplitudes where both qubits are |1>.
    void apply_cz(int qubit_a, int qubit_b) {
        check_qubit(qubit_a);
        check_qubit(qubit_b);
        if (qubit_a == qubit_b) {
            throw StructuralError("CZ qubits must differ");
        }
        const std::size_t mask =
            (std::size_t{1} << qubit_a) | (std::size_t{1} << qubit_b);
        const std::size_t n = amplitudes_.size();
        for (std::size_t i = 0; i < n; ++i) {
            if ((i & mask) == mask) {
                amplitudes_[i] = -amplitudes_[i];
            }
        }
    }

    /// <Z_q> = sum over basis states of |amp|^2 * (+1 if bit q clear, else -1).
    [[nodiscard]] double expectation_z(int qubit) const {
        check_qubit(qubit);
        const std::size_t bit = std::size_t{1} << qubit;
        double e = 0.0;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            const double p = std::norm(amplitudes_[i]);
            e += (i & bit) ? -p : p;
        }
        return e;
    }

  private:
    int n_qubits_;
    std::vector<Complex> amplitudes_;
};

inline StateVector init_zero_state(int n_qubits) { return StateVector(n_qubits); }

} // namespace qsac::qsim

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

#include <random>
#include <vector>

#include "qsac/errors.hpp"

namespace qsac::sac {

/// done is true only on genuine terminal states; time-limit truncation keeps
/// done=false so bootstrapping continues across the cut.
struct Transition {
    std::vector<double> obs;
    std::vector<double> action;  // env scale
    double reward = 0.0;
    std::vector<double> next_obs;
    bool done = false;
};

/// Bounded FIFO ring with uniform sampling (with replacement across a batch).
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) {
            throw ConfigError("replay capacity must be positive");
        }
        storage_.reserve(capacity);
    }

    void push(Transition t) {
        if (storage_.size() < capacity_) {
            storage_.push_back(std::move(t));
        } else {
            storage_[next_] = std::move(t);
        }
        next_ = (next_ + 1) % capacity_;
        ++inserted_;
    }

    [[nodiscard]] std::size_t size() const { return storage_.size(); }
    [[nodiscard]] std::size_t capacity() const { return capacity_; }
    [[nodiscard]] std::size_t inserted() const { return inserted_; }
    [[nodiscard]] const Transition &at(std::size_t i) const { return storage_[i]; }

    [[nodiscard]] std::vector<Transition> sample(std::size_t n,
                                                 std::mt19937_64 &rng) const {
        if (storage_.empty()) {
            throw UsageError("cannot sample from an empty replay buffer");
        }
        std::uniform_int_distribution<std::size_t> dist(0, storage_.size() - 1);
        std::vector<Transition> batch;
        batch.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            batch.push_back(storage_[dist(rng)]);
        }
        return batch;
    }

  private:
    std::size_t capacity_;
    std::vector<Transition> storage_;
    std::size_t next_ = 0;
    std::size_t inserted_ = 0;
};

} // namespace qsac::sac

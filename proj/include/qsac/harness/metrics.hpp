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

#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qsac/errors.hpp"

namespace qsac::harness {

inline constexpr int kRollingWindow = 20;

struct EpisodeMetrics {
    std::size_t episode = 0;
    double episode_return = 0.0;
    double avg_return_20 = 0.0;  // rolling mean over the last 20 returns
    std::size_t steps = 0;
    std::size_t cumulative_steps = 0;
    double sps = 0.0;  // wall-clock, the only non-deterministic column
};

/// Shortest round-trippable decimal form, stable across runs.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline const char *kMetricsHeader =
    "episode,return,avg_return_20,steps,cumulative_steps,sps";

class MetricsWriter {
  public:
    explicit MetricsWriter(const std::string &path) : out_(path) {
        if (!out_) {
            throw UsageError("cannot open metrics file for writing: " + path);
        }
        out_ << kMetricsHeader << "\n";
    }

    void append(const EpisodeMetrics &m) {
        out_ << m.episode << ',' << format_double(m.episode_return) << ','
             << format_double(m.avg_return_20) << ',' << m.steps << ','
             << m.cumulative_steps << ',' << format_double(m.sps) << "\n";
        out_.flush();
    }

  private:
    std::ofstream out_;
};

/// Tracks the rolling-window average as episodes finish.
class RollingReturn {
  public:
    double push(double episode_return) {
        window_.push_back(episode_return);
        if (window_.size() > kRollingWindow) {
            window_.pop_front();
        }
        double s = 0.0;
        for (double r : window_) {
            s += r;
        }
        return s / static_cast<double>(window_.size());
    }

  private:
    std::deque<double> window_;
};

inline std::vector<EpisodeMetrics> read_metrics(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open metrics file: " + path);
    }
    std::string line;
    if (!std::getline(in, line) || line != kMetricsHeader) {
        throw UsageError("bad metrics header in " + path);
    }
    std::vector<EpisodeMetrics> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() != 6) {
            throw UsageError("bad metrics row in " + path + ": " + line);
        }
        EpisodeMetrics m;
        m.episode = std::stoull(cells[0]);
        m.episode_return = std::stod(cells[1]);
        m.avg_return_20 = std::stod(cells[2]);
        m.steps = std::stoull(cells[3]);
        m.cumulative_steps = std::stoull(cells[4]);
        m.sps = std::stod(cells[5]);
        rows.push_back(m);
    }
    return rows;
}

} // namespace qsac::harness

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
 * Run summaries and plot-ready data files, all recomputed from metrics.csv.
 */
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsac/harness/metrics.hpp"

namespace qsac::harness {

struct RunSummary {
    std::string run;  // directory name label
    bool ok = false;
    std::string error;
    std::size_t total_episodes = 0;
    double average_return = 0.0;
    double max_return = 0.0;
    std::size_t cumulative_steps = 0;
    double mean_sps = 0.0;
};

inline RunSummary summarize_run(const std::filesystem::path &dir) {
    RunSummary s;
    s.run = dir.filename().string().empty() ? dir.string()
                                            : dir.filename().string();
    try {
        const auto rows = read_metrics((dir / "metrics.csv").string());
        if (rows.empty()) {
            throw UsageError("no episodes recorded");
        }
        s.total_episodes = rows.size();
        double sum = 0.0;
        double sps_sum = 0.0;
        s.max_return = rows.front().episode_return;
        for (const auto &r : rows) {
            sum += r.episode_return;
            sps_sum += r.sps;
            s.max_return = std::max(s.max_return, r.episode_return);
        }
        s.average_return = sum / static_cast<double>(rows.size());
        s.mean_sps = sps_sum / static_cast<double>(rows.size());
        s.cumulative_steps = rows.back().cumulative_steps;
        s.ok = true;
    } catch (const std::exception &e) {
        s.error = e.what();
    }
    return s;
}

inline std::vector<RunSummary>
summarize(const std::vector<std::filesystem::path> &dirs) {
    std::vector<RunSummary> out;
    out.reserve(dirs.size());
    for (const auto &d : dirs) {
        out.push_back(summarize_run(d));
    }
    return out;
}

/// Aligned text table with the comparison rows "Total Episodes",
/// "Average Return", "Max Return" plus step/throughput lines.
inline std::string render_summary_table(const std::vector<RunSummary> &runs) {
    const std::vector<std::string> labels{
        "Total Episodes", "Average Return", "Max Return",
        "Cumulative Steps", "Mean SPS"};
    std::size_t label_w = 0;
    for (const auto &l : labels) {
        label_w = std::max(label_w, l.size());
    }
    auto fmt = [](double v) {
        std::ostringstream ss;
        ss << std::fixed << std::setprecision(6) << v;
        return ss.str();
    };
    std::vector<std::vector<std::string>> cols;
    for (const auto &r : runs) {
        if (!r.ok) {
            cols.push_back({r.run, "ERROR", "ERROR", "ERROR", "ERROR", "ERROR"});
            continue;
        }
        cols.push_back({r.run, fmt(static_cast<double>(r.total_episodes)),
                        fmt(r.average_return), fmt(r.max_return),
                        std::to_string(r.cumulative_steps), fmt(r.mean_sps)});
    }
    std::vector<std::size_t> widths(cols.size(), 0);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        for (const auto &cell : cols[c]) {
            widths[c] = std::max(widths[c], cell.size());
        }
    }
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(label_w)) << "Metric";
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out << "  " << std::setw(static_cast<int>(widths[c])) << cols[c][0];
    }
    out << "\n";
    for (std::size_t row = 0; row < labels.size(); ++row) {
        out << std::left << std::setw(static_cast<int>(label_w)) << labels[row];
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out << "  " << std::setw(static_cast<int>(widths[c]))
                << cols[c][row + 1];
        }
        out << "\n";
    }
    return out.str();
}

inline nlohmann::json summary_json(const std::vector<RunSummary> &runs) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto &r : runs) {
        if (r.ok) {
            j.push_back({{"run", r.run},
                         {"Total Episodes", r.total_episodes},
                         {"Average Return", r.average_return},
                         {"Max Return", r.max_return},
                         {"cumulative_steps", r.cumulative_steps},
                         {"mean_sps", r.mean_sps}});
        } else {
            j.push_back({{"run", r.run}, {"error", r.error}});
        }
    }
    return j;
}

/// Long-format CSVs for external plotting: return vs episode, rolling-average
/// return vs episode, and SPS paired with rolling-average return.
inline void emit_plot_data(const std::vector<std::filesystem::path> &dirs,
                           const std::filesystem::path &out_dir,
                           std::vector<RunSummary> *errors_out = nullptr) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ofstream ret(out_dir / "return_vs_episode.csv");
    std::ofstream avg(out_dir / "avg_return_vs_episode.csv");
    std::ofstream sps(out_dir / "sps_vs_avg_return.csv");
    ret << "run,episode,return\n";
    avg << "run,episode,avg_return_20\n";
    sps << "run,avg_return_20,sps\n";
    for (const auto &dir : dirs) {
        const std::string label = dir.filename().string().empty()
                                      ? dir.string()
                                      : dir.filename().string();
        try {
            const auto rows = read_metrics((dir / "metrics.csv").string());
            for (const auto &r : rows) {
                ret << label << ',' << r.episode << ','
                    << format_double(r.episode_return) << "\n";
                avg << label << ',' << r.episode << ','
                    << format_double(r.avg_return_20) << "\n";
                sps << label << ',' << format_double(r.avg_return_20) << ','
                    << format_double(r.sps) << "\n";
            }
        } catch (const std::exception &e) {
            if (errors_out) {
                RunSummary s;
                s.run = label;
                s.error = e.what();
                errors_out->push_back(s);
            }
        }
    }
}

} // namespace qsac::harness

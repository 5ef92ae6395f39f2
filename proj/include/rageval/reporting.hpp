/// @file reporting.hpp
/// @brief Run manifests, fixed-width tables, CSV/JSON exports.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rageval/metrics.hpp"
#include "rageval/modelclient.hpp"

namespace rageval::reporting {

/// Everything needed to rerun or audit a run. Credentials never appear here:
/// endpoint configs carry environment variable NAMES only.
struct RunManifest {
    std::string harness_version;
    std::string dataset_path;
    std::string dataset_digest;
    std::size_t instance_count = 0;
    std::vector<std::string> template_ids;
    std::vector<modelclient::ModelEndpointConfig> models;
    std::optional<modelclient::ModelEndpointConfig> judge;
    modelclient::GenParams gen_params;
    int concurrency = 1;
    int judge_concurrency = 1;
    std::string timing_mode;  // "serial" or "concurrent"
    std::optional<std::size_t> instance_limit;
    std::optional<std::uint64_t> sample_seed;
    int repeats = 1;
    std::size_t cell_count = 0;
    std::string started_at;
    std::string finished_at;

    bool operator==(const RunManifest&) const = default;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& json_text);

/// Fixed-width text table of the top `top_k` leaderboard rows (all rows when
/// top_k is 0). Columns: Rank | Prompt Method | Accuracy | Time(s) |
/// Efficiency. When the baseline template is ranked below the cutoff it is
/// appended as a final "Ranked <n>" row so every report shows where the
/// baseline stands.
std::string render_table(const metrics::Leaderboard& lb, std::size_t top_k = 0,
                         const std::string& baseline_id = "standard_context_aware");

/// Writes leaderboard.csv, leaderboard.json, scatter.csv and manifest.json
/// into `dir` (created if missing). CSV numbers use 3 decimals with '.'
/// regardless of locale; files end with a newline; output is byte-stable for
/// identical inputs.
void export_leaderboard(const metrics::Leaderboard& lb, const RunManifest& manifest,
                        const std::string& dir);

}  // namespace rageval::reporting

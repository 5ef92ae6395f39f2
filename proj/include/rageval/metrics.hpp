/// @file metrics.hpp
/// @brief Per-strategy aggregation, efficiency, ranking and baseline deltas.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rageval::metrics {

/// One fully evaluated matrix cell. `accuracy` is the judge score; it is
/// absent when the cell failed (generation error or unusable judge reply)
/// and may also be absent on judge-less runs where only latency matters.
struct ScoredRecord {
    std::string template_id;
    std::string instance_id;
    std::string model_name;
    std::optional<double> accuracy;
    double latency_s = 0.0;
    bool failed = false;
};

/// Group summary for one (model, template) pair. Efficiency is the ratio of
/// means, avg_accuracy / avg_time_s, computed on unrounded values.
struct PromptAggregate {
    std::string template_id;
    std::string model_name;
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
    std::optional<double> avg_accuracy;
    std::optional<double> avg_time_s;
    std::optional<double> efficiency;
};

/// Groups by (model_name, template_id) and averages over non-failed records.
/// Zero-ok groups are kept (with empty averages) so failures stay visible.
/// Order-insensitive: shuffled input produces identical output, sorted by
/// (model_name, template_id).
std::vector<PromptAggregate> aggregate(const std::vector<ScoredRecord>& records);

enum class RankKey { accuracy, efficiency, time };

struct LeaderboardEntry {
    std::size_t rank = 0;  // 1-based
    PromptAggregate stats;
};

struct Leaderboard {
    std::string model_name;
    RankKey key = RankKey::accuracy;
    std::vector<LeaderboardEntry> entries;
};

std::string rank_key_name(RankKey key);

/// Sorts one model's aggregates: accuracy/efficiency descending, time
/// ascending; ties break lexicographically by template_id; groups without a
/// usable key value sink to the bottom. Mixing models is a ConfigError.
Leaderboard rank(const std::vector<PromptAggregate>& aggregates, RankKey key);

/// avg_accuracy(template) - avg_accuracy(baseline) per template, same model.
/// Throws ConfigError when the baseline id is absent or has no accuracy.
std::map<std::string, double> baseline_delta(const std::vector<PromptAggregate>& aggregates,
                                             const std::string& baseline_id);

}  // namespace rageval::metrics

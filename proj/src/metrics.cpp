#include "rageval/metrics.hpp"

#include <algorithm>
#include <tuple>

#include "rageval/common.hpp"

namespace rageval::metrics {

namespace {

/// Sorted before summation so the float result cannot depend on input order.
double mean_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

std::vector<PromptAggregate> aggregate(const std::vector<ScoredRecord>& records) {
    struct Group {
        std::size_t n_ok = 0;
        std::size_t n_failed = 0;
        std::vector<double> accuracies;
        std::vector<double> latencies;
    };
    std::map<std::pair<std::string, std::string>, Group> groups;
    for (const auto& rec : records) {
        Group& g = groups[{rec.model_name, rec.template_id}];
        if (rec.failed) {
            ++g.n_failed;
            continue;
        }
        ++g.n_ok;
        g.latencies.push_back(rec.latency_s);
        if (rec.accuracy) g.accuracies.push_back(*rec.accuracy);
    }

    std::vector<PromptAggregate> out;
    out.reserve(groups.size());
    for (auto& [key, g] : groups) {
        PromptAggregate agg;
        agg.model_name = key.first;
        agg.template_id = key.second;
        agg.n_ok = g.n_ok;
        agg.n_failed = g.n_failed;
        if (!g.latencies.empty()) agg.avg_time_s = mean_of(std::move(g.latencies));
        if (!g.accuracies.empty()) agg.avg_accuracy = mean_of(std::move(g.accuracies));
        if (agg.avg_accuracy && agg.avg_time_s && *agg.avg_time_s > 0.0)
            agg.efficiency = *agg.avg_accuracy / *agg.avg_time_s;
        out.push_back(std::move(agg));
    }
    return out;  // map iteration order is already (model, template) sorted
}

std::string rank_key_name(RankKey key) {
    switch (key) {
        case RankKey::accuracy: return "accuracy";
        case RankKey::efficiency: return "efficiency";
        case RankKey::time: return "time";
    }
    return "accuracy";
}

Leaderboard rank(const std::vector<PromptAggregate>& aggregates, RankKey key) {
    Leaderboard lb;
    lb.key = key;
    if (aggregates.empty()) return lb;
    lb.model_name = aggregates.front().model_name;
    for (const auto& agg : aggregates) {
        if (agg.model_name != lb.model_name)
            throw ConfigError("rank() expects a single model, got both '" + lb.model_name +
                              "' and '" + agg.model_name + "'");
    }

    auto key_value = [key](const PromptAggregate& a) -> std::optional<double> {
        switch (key) {
            case RankKey::accuracy: return a.avg_accuracy;
            case RankKey::efficiency: return a.efficiency;
            case RankKey::time: return a.avg_time_s;
        }
        return std::nullopt;
    };

    std::vector<PromptAggregate> sorted = aggregates;
    std::sort(sorted.begin(), sorted.end(),
              [&](const PromptAggregate& a, const PromptAggregate& b) {
                  auto va = key_value(a);
                  auto vb = key_value(b);
                  if (va.has_value() != vb.has_value()) return va.has_value();
                  if (va && vb && *va != *vb) {
                      if (key == RankKey::time) return *va < *vb;
                      return *va > *vb;
                  }
                  return a.template_id < b.template_id;
              });

    lb.entries.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        lb.entries.push_back({i + 1, std::move(sorted[i])});
    return lb;
}

std::map<std::string, double> baseline_delta(const std::vector<PromptAggregate>& aggregates,
                                             const std::string& baseline_id) {
    const PromptAggregate* baseline = nullptr;
    std::string model;
    for (const auto& agg : aggregates) {
        if (model.empty()) model = agg.model_name;
        if (agg.model_name != model)
            throw ConfigError("baseline_delta() expects a single model");
        if (agg.template_id == baseline_id) baseline = &agg;
    }
    if (baseline == nullptr)
        throw ConfigError("baseline template not present: " + baseline_id);
    if (!baseline->avg_accuracy)
        throw ConfigError("baseline has no accuracy: " + baseline_id);

    std::map<std::string, double> deltas;
    for (const auto& agg : aggregates) {
        if (!agg.avg_accuracy) continue;
        deltas[agg.template_id] = *agg.avg_accuracy - *baseline->avg_accuracy;
    }
    return deltas;
}

}  // namespace rageval::metrics

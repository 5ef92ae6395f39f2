#include "rageval/reporting.hpp"

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "rageval/common.hpp"

namespace rageval::reporting {

using nlohmann::json;

namespace {

json endpoint_to_json(const modelclient::ModelEndpointConfig& cfg) {
    // api_key_env is the variable NAME; the token value must never land here.
    return json{
        {"base_url", cfg.base_url},
        {"model_name", cfg.model_name},
        {"api_key_env", cfg.api_key_env},
        {"timeout_s", cfg.timeout_s},
        {"max_retries", cfg.max_retries},
        {"retry_backoff_ms", cfg.retry_backoff_ms},
    };
}

modelclient::ModelEndpointConfig endpoint_from_json(const json& obj) {
    modelclient::ModelEndpointConfig cfg;
    cfg.base_url = obj.at("base_url").get<std::string>();
    cfg.model_name = obj.at("model_name").get<std::string>();
    cfg.api_key_env = obj.at("api_key_env").get<std::string>();
    cfg.timeout_s = obj.at("timeout_s").get<double>();
    cfg.max_retries = obj.at("max_retries").get<int>();
    cfg.retry_backoff_ms = obj.at("retry_backoff_ms").get<int>();
    return cfg;
}

std::string fmt_opt(const std::optional<double>& v, int decimals) {
    return v ? format_fixed(*v, decimals) : std::string();
}

std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string manifest_to_json(const RunManifest& m) {
    json doc;
    doc["harness_version"] = m.harness_version;
    doc["dataset"] = {
        {"path", m.dataset_path},
        {"digest", m.dataset_digest},
        {"instance_count", m.instance_count},
    };
    doc["template_ids"] = m.template_ids;
    doc["models"] = json::array();
    for (const auto& cfg : m.models) doc["models"].push_back(endpoint_to_json(cfg));
    doc["judge"] = m.judge ? endpoint_to_json(*m.judge) : json(nullptr);
    doc["gen_params"] = {
        {"temperature", m.gen_params.temperature},
        {"max_new_tokens", m.gen_params.max_new_tokens},
        {"stop_sequences", m.gen_params.stop_sequences},
    };
    doc["concurrency"] = m.concurrency;
    doc["judge_concurrency"] = m.judge_concurrency;
    doc["timing_mode"] = m.timing_mode;
    doc["instance_limit"] = m.instance_limit ? json(*m.instance_limit) : json(nullptr);
    doc["sample_seed"] = m.sample_seed ? json(*m.sample_seed) : json(nullptr);
    doc["repeats"] = m.repeats;
    doc["cell_count"] = m.cell_count;
    doc["started_at"] = m.started_at;
    doc["finished_at"] = m.finished_at;
    return doc.dump(2);
}

namespace {

RunManifest manifest_from_object(const json& doc) {
    RunManifest m;
    m.harness_version = doc.at("harness_version").get<std::string>();
    const json& ds = doc.at("dataset");
    m.dataset_path = ds.at("path").get<std::string>();
    m.dataset_digest = ds.at("digest").get<std::string>();
    m.instance_count = ds.at("instance_count").get<std::size_t>();
    m.template_ids = doc.at("template_ids").get<std::vector<std::string>>();
    for (const auto& obj : doc.at("models")) m.models.push_back(endpoint_from_json(obj));
    if (!doc.at("judge").is_null()) m.judge = endpoint_from_json(doc.at("judge"));
    const json& gp = doc.at("gen_params");
    m.gen_params.temperature = gp.at("temperature").get<double>();
    m.gen_params.max_new_tokens = gp.at("max_new_tokens").get<int>();
    m.gen_params.stop_sequences = gp.at("stop_sequences").get<std::vector<std::string>>();
    m.concurrency = doc.at("concurrency").get<int>();
    m.judge_concurrency = doc.at("judge_concurrency").get<int>();
    m.timing_mode = doc.at("timing_mode").get<std::string>();
    if (!doc.at("instance_limit").is_null())
        m.instance_limit = doc.at("instance_limit").get<std::size_t>();
    if (!doc.at("sample_seed").is_null())
        m.sample_seed = doc.at("sample_seed").get<std::uint64_t>();
    m.repeats = doc.at("repeats").get<int>();
    m.cell_count = doc.at("cell_count").get<std::size_t>();
    m.started_at = doc.at("started_at").get<std::string>();
    m.finished_at = doc.at("finished_at").get<std::string>();
    return m;
}

}  // namespace

RunManifest manifest_from_json(const std::string& json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw DatasetError("manifest is not a JSON object");
    try {
        return manifest_from_object(doc);
    } catch (const json::exception& e) {
        throw DatasetError(std::string("manifest field error: ") + e.what());
    }
}

std::string render_table(const metrics::Leaderboard& lb, std::size_t top_k,
                         const std::string& baseline_id) {
    if (lb.entries.empty()) throw ConfigError("render_table: leaderboard is empty");

    const metrics::LeaderboardEntry* baseline = nullptr;
    for (const auto& e : lb.entries)
        if (e.stats.template_id == baseline_id) baseline = &e;

    std::size_t shown = top_k == 0 ? lb.entries.size() : std::min(top_k, lb.entries.size());
    bool baseline_row = top_k != 0 && baseline != nullptr && baseline->rank > shown;

    struct Row {
        std::string rank, method, accuracy, time, efficiency;
    };
    std::vector<Row> rows;
    rows.push_back({"Rank", "Prompt Method", "Accuracy", "Time(s)", "Efficiency"});
    auto push_entry = [&rows](const metrics::LeaderboardEntry& e, bool as_baseline) {
        Row r;
        r.rank = as_baseline ? "Ranked " + std::to_string(e.rank) : std::to_string(e.rank);
        r.method = e.stats.template_id;
        r.accuracy = fmt_opt(e.stats.avg_accuracy, 3);
        r.time = fmt_opt(e.stats.avg_time_s, 3);
        r.efficiency = fmt_opt(e.stats.efficiency, 3);
        for (std::string* cell : {&r.accuracy, &r.time, &r.efficiency})
            if (cell->empty()) *cell = "-";
        rows.push_back(std::move(r));
    };
    for (std::size_t i = 0; i < shown; ++i) push_entry(lb.entries[i], false);
    if (baseline_row) push_entry(*baseline, true);

    std::size_t w_rank = 0, w_method = 0, w_acc = 0, w_time = 0, w_eff = 0;
    for (const auto& r : rows) {
        w_rank = std::max(w_rank, r.rank.size());
        w_method = std::max(w_method, r.method.size());
        w_acc = std::max(w_acc, r.accuracy.size());
        w_time = std::max(w_time, r.time.size());
        w_eff = std::max(w_eff, r.efficiency.size());
    }

    std::string out;
    for (const auto& r : rows) {
        out += pad_left(r.rank, w_rank);
        out += " | ";
        out += pad_right(r.method, w_method);
        out += " | ";
        out += pad_left(r.accuracy, w_acc);
        out += " | ";
        out += pad_left(r.time, w_time);
        out += " | ";
        out += pad_left(r.efficiency, w_eff);
        out += '\n';
    }
    return out;
}

void export_leaderboard(const metrics::Leaderboard& lb, const RunManifest& manifest,
                        const std::string& dir) {
    std::filesystem::create_directories(dir);
    auto path = [&dir](const char* name) {
        return (std::filesystem::path(dir) / name).string();
    };

    std::string csv = "rank,prompt_method,accuracy,time_s,efficiency,n_ok,n_failed\n";
    std::string scatter = "prompt_method,accuracy,time_s\n";
    json records = json::array();
    for (const auto& e : lb.entries) {
        csv += std::to_string(e.rank);
        csv += ',' + e.stats.template_id;
        csv += ',' + fmt_opt(e.stats.avg_accuracy, 3);
        csv += ',' + fmt_opt(e.stats.avg_time_s, 3);
        csv += ',' + fmt_opt(e.stats.efficiency, 3);
        csv += ',' + std::to_string(e.stats.n_ok);
        csv += ',' + std::to_string(e.stats.n_failed);
        csv += '\n';

        scatter += e.stats.template_id;
        scatter += ',' + fmt_opt(e.stats.avg_accuracy, 3);
        scatter += ',' + fmt_opt(e.stats.avg_time_s, 3);
        scatter += '\n';

        json rec;
        rec["rank"] = e.rank;
        rec["prompt_method"] = e.stats.template_id;
        rec["accuracy"] = e.stats.avg_accuracy ? json(*e.stats.avg_accuracy) : json(nullptr);
        rec["time_s"] = e.stats.avg_time_s ? json(*e.stats.avg_time_s) : json(nullptr);
        rec["efficiency"] = e.stats.efficiency ? json(*e.stats.efficiency) : json(nullptr);
        rec["n_ok"] = e.stats.n_ok;
        rec["n_failed"] = e.stats.n_failed;
        records.push_back(std::move(rec));
    }
    json board;
    board["model_name"] = lb.model_name;
    board["rank_key"] = metrics::rank_key_name(lb.key);
    board["entries"] = std::move(records);

    write_file(path("leaderboard.csv"), csv);
    write_file(path("scatter.csv"), scatter);
    write_file(path("leaderboard.json"), board.dump(2) + "\n");
    write_file(path("manifest.json"), manifest_to_json(manifest) + "\n");
}

}  // namespace rageval::reporting

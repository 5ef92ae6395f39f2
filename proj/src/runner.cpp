#include "rageval/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fcntl.h>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "rageval/common.hpp"

namespace rageval::runner {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------- Cache keys ----------

std::string cache_key(const std::string& model_name, const std::string& template_id,
                      const std::string& instance_id, int repeat,
                      const modelclient::GenParams& params, const std::string& template_body) {
    std::string stops;
    for (const auto& s : params.stop_sequences) {
        stops += s;
        stops += '\x1e';
    }
    std::string enc;
    enc += "model=" + model_name + '\x1f';
    enc += "template=" + template_id + '\x1f';
    enc += "instance=" + instance_id + '\x1f';
    enc += "repeat=" + std::to_string(repeat) + '\x1f';
    enc += "temperature=" + format_fixed(params.temperature, 6) + '\x1f';
    enc += "max_new_tokens=" + std::to_string(params.max_new_tokens) + '\x1f';
    enc += "stop=" + stops + '\x1f';
    enc += "body=" + to_hex(fnv1a64(template_body));
    return to_hex(fnv1a64(enc));
}

// ---------- Run lock ----------

RunLock::RunLock(const std::string& dir) {
    fs::create_directories(dir);
    path_ = (fs::path(dir) / "run.lock").string();
    int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        if (errno == EEXIST)
            throw ConfigError("output directory is locked by another run (delete " + path_ +
                              " if that run is dead)");
        throw ConfigError("cannot create lock file: " + path_);
    }
    std::string note = "pid=" + std::to_string(::getpid()) + "\n";
    ssize_t n = ::write(fd, note.data(), note.size());
    (void)n;
    ::close(fd);
}

RunLock::~RunLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

// ---------- Cell state and cache blobs ----------

namespace {

struct CellState {
    std::size_t model_idx = 0;
    std::size_t template_idx = 0;
    std::size_t instance_idx = 0;
    int repeat = 1;
    std::string key;

    modelclient::GenerationRecord gen;
    bool gen_done = false;
    bool gen_retry_done = false;  // a failed generation was already retried once

    bool has_judge = false;
    judge::JudgeScore js;
    std::string judge_model;
    std::string judge_error;  // transport failure, distinct from parse failure
    bool judge_retry_done = false;
};

json cell_to_json(const CellState& cell) {
    json gen;
    gen["template_id"] = cell.gen.template_id;
    gen["instance_id"] = cell.gen.instance_id;
    gen["model_name"] = cell.gen.model_name;
    gen["answer_text"] = cell.gen.answer_text;
    gen["error"] = cell.gen.error ? json(*cell.gen.error) : json(nullptr);
    gen["latency_s"] = cell.gen.latency_s;
    gen["attempts"] = cell.gen.attempts;
    gen["retry_done"] = cell.gen_retry_done;

    json doc;
    doc["key"] = cell.key;
    doc["repeat"] = cell.repeat;
    doc["generation"] = std::move(gen);
    if (cell.has_judge) {
        json js;
        js["value"] = cell.js.value ? json(*cell.js.value) : json(nullptr);
        js["raw_reply"] = cell.js.raw_reply;
        js["parse_status"] = judge::parse_status_name(cell.js.parse_status);
        js["attempts"] = cell.js.attempts;
        js["warning"] = cell.js.warning ? json(*cell.js.warning) : json(nullptr);
        js["judge_model"] = cell.judge_model;
        js["judge_error"] = cell.judge_error;
        js["retry_done"] = cell.judge_retry_done;
        doc["judge"] = std::move(js);
    } else {
        doc["judge"] = nullptr;
    }
    return doc;
}

/// Returns false (cache miss) on any structural mismatch; a corrupt cache
/// file must never kill a run.
bool cell_from_json(const json& doc, const std::string& expected_key, CellState& cell) {
    try {
        if (!doc.is_object() || doc.at("key").get<std::string>() != expected_key) return false;
        const json& gen = doc.at("generation");
        cell.gen.template_id = gen.at("template_id").get<std::string>();
        cell.gen.instance_id = gen.at("instance_id").get<std::string>();
        cell.gen.model_name = gen.at("model_name").get<std::string>();
        cell.gen.answer_text = gen.at("answer_text").get<std::string>();
        if (gen.at("error").is_null()) cell.gen.error.reset();
        else cell.gen.error = gen.at("error").get<std::string>();
        cell.gen.latency_s = gen.at("latency_s").get<double>();
        cell.gen.attempts = gen.at("attempts").get<int>();
        cell.gen_retry_done = gen.at("retry_done").get<bool>();
        cell.gen_done = true;

        const json& js = doc.at("judge");
        if (!js.is_null()) {
            if (js.at("value").is_null()) cell.js.value.reset();
            else cell.js.value = js.at("value").get<double>();
            cell.js.raw_reply = js.at("raw_reply").get<std::string>();
            cell.js.parse_status =
                judge::parse_status_from_name(js.at("parse_status").get<std::string>());
            cell.js.attempts = js.at("attempts").get<int>();
            if (js.at("warning").is_null()) cell.js.warning.reset();
            else cell.js.warning = js.at("warning").get<std::string>();
            cell.judge_model = js.at("judge_model").get<std::string>();
            cell.judge_error = js.at("judge_error").get<std::string>();
            cell.judge_retry_done = js.at("retry_done").get<bool>();
            cell.has_judge = true;
        }
        return true;
    } catch (const json::exception&) {
        return false;
    }
}

class CellCache {
public:
    explicit CellCache(std::string dir) : dir_(std::move(dir)) {
        if (enabled()) fs::create_directories(dir_);
    }

    bool enabled() const { return !dir_.empty(); }

    bool load(const std::string& key, CellState& cell) const {
        if (!enabled()) return false;
        std::string path = file_for(key);
        if (!file_exists(path)) return false;
        json doc = json::parse(read_file(path), nullptr, false);
        if (doc.is_discarded()) return false;
        CellState loaded = cell;  // keep indices, overwrite payload
        if (!cell_from_json(doc, key, loaded)) return false;
        cell = std::move(loaded);
        return true;
    }

    void store(const CellState& cell) const {
        if (!enabled()) return;
        std::string path = file_for(cell.key);
        std::string tmp = path + ".tmp";
        write_file(tmp, cell_to_json(cell).dump(2) + "\n");
        fs::rename(tmp, path);  // atomic within the directory
    }

private:
    std::string file_for(const std::string& key) const {
        return (fs::path(dir_) / (key + ".json")).string();
    }

    std::string dir_;
};

constexpr const char* kSentinelPrefix = "\n[[instance:";

std::string with_sentinel(const std::string& text, const std::string& instance_id) {
    return text + kSentinelPrefix + instance_id + "]]";
}

void validate_config(const RunConfig& config) {
    if (config.dataset_path.empty()) throw ConfigError("dataset path is required");
    if (config.models.empty()) throw ConfigError("at least one model endpoint is required");
    if (!config.skip_judge && !config.judge)
        throw ConfigError("judge endpoint is required unless judging is skipped");
    if (config.concurrency < 1 || config.judge_concurrency < 1)
        throw ConfigError("concurrency caps must be >= 1");
    if (config.repeats < 1) throw ConfigError("repeats must be >= 1");
    if (config.judge_only && config.cache_dir.empty())
        throw ConfigError("judge-only mode needs a cache directory with prior generations");
    if (config.judge_only && config.skip_judge)
        throw ConfigError("judge-only and skip-judge are mutually exclusive");
}

}  // namespace

std::string sanitize_dir_name(const std::string& name) {
    std::string out;
    for (char c : to_lower(name)) {
        bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '-' ||
                    c == '_';
        out.push_back(keep ? c : '_');
    }
    return out.empty() ? "model" : out;
}

RunResult run_matrix(const RunConfig& config) {
    validate_config(config);

    // Dataset: plain limit truncates, limit+seed samples deterministically.
    corpus::Dataset dataset;
    if (config.limit && config.sample_seed) {
        dataset = corpus::load_dataset(config.dataset_path);
        dataset.instances =
            corpus::sample_instances(dataset.instances, *config.limit, *config.sample_seed);
        dataset.manifest.instance_count = dataset.instances.size();
    } else {
        dataset = corpus::load_dataset(config.dataset_path, config.limit);
    }
    const auto& instances = dataset.instances;

    // Templates: registry plus any user directory, optionally filtered.
    std::vector<templates::PromptTemplate> all = templates::registry();
    if (!config.templates_dir.empty()) {
        auto extra = templates::load_template_dir(config.templates_dir);
        all.insert(all.end(), extra.begin(), extra.end());
    }
    std::vector<templates::PromptTemplate> selected;
    if (config.template_filter.empty()) {
        selected = all;
    } else {
        for (const auto& id : config.template_filter) {
            auto it = std::find_if(all.begin(), all.end(),
                                   [&](const auto& t) { return t.id == id; });
            if (it == all.end()) throw ConfigError("unknown template id: " + id);
            selected.push_back(*it);
        }
    }
    if (selected.empty()) throw ConfigError("no templates selected");

    TransportFactory gen_factory = config.transport_factory;
    if (!gen_factory)
        gen_factory = [](const modelclient::ModelEndpointConfig& cfg) {
            return std::make_unique<modelclient::HttpTransport>(cfg);
        };
    TransportFactory judge_factory = config.judge_transport_factory;
    if (!judge_factory)
        judge_factory = [](const modelclient::ModelEndpointConfig& cfg) {
            return std::make_unique<modelclient::HttpTransport>(cfg);
        };

    reporting::RunManifest manifest;
    manifest.harness_version = RAGEVAL_VERSION;
    manifest.dataset_path = config.dataset_path;
    manifest.dataset_digest = dataset.manifest.content_digest;
    manifest.instance_count = instances.size();
    for (const auto& tpl : selected) manifest.template_ids.push_back(tpl.id);
    manifest.models = config.models;
    manifest.judge = config.skip_judge ? std::nullopt : config.judge;
    manifest.gen_params = config.gen_params;
    manifest.concurrency = config.concurrency;
    manifest.judge_concurrency = config.judge_concurrency;
    manifest.timing_mode = config.concurrency == 1 ? "serial" : "concurrent";
    manifest.instance_limit = config.limit;
    manifest.sample_seed = config.sample_seed;
    manifest.repeats = config.repeats;
    manifest.started_at = utc_timestamp(config.fixed_clock);

    // Hold the output directory for the whole run.
    std::unique_ptr<RunLock> lock;
    if (!config.out_dir.empty()) lock = std::make_unique<RunLock>(config.out_dir);

    if (!config.skip_probe) {
        for (const auto& model : config.models) {
            auto transport = gen_factory(model);
            auto health = modelclient::probe(*transport, model);
            if (!health.reachable)
                throw TransportError("model endpoint unreachable (" + model.base_url +
                                     "): " + health.error);
        }
        if (!config.skip_judge) {
            auto transport = judge_factory(*config.judge);
            auto health = modelclient::probe(*transport, *config.judge);
            if (!health.reachable)
                throw TransportError("judge endpoint unreachable (" + config.judge->base_url +
                                     "): " + health.error);
        }
    }

    // Cell enumeration: model-major, then template, instance, repeat.
    std::vector<CellState> cells;
    cells.reserve(config.models.size() * selected.size() * instances.size() *
                  static_cast<std::size_t>(config.repeats));
    for (std::size_t m = 0; m < config.models.size(); ++m)
        for (std::size_t t = 0; t < selected.size(); ++t)
            for (std::size_t i = 0; i < instances.size(); ++i)
                for (int r = 1; r <= config.repeats; ++r) {
                    CellState cell;
                    cell.model_idx = m;
                    cell.template_idx = t;
                    cell.instance_idx = i;
                    cell.repeat = r;
                    cell.key = cache_key(config.models[m].model_name, selected[t].id,
                                         instances[i].id, r, config.gen_params,
                                         selected[t].body);
                    cells.push_back(std::move(cell));
                }

    CellCache cache(config.cache_dir);

    // ---------- Stage 1: generate everything ----------
    std::atomic<std::size_t> completed{0};
    std::atomic<bool> interrupted{false};
    parallel_for(cells.size(), config.concurrency, [&](std::size_t i) {
        CellState& cell = cells[i];
        const auto& model = config.models[cell.model_idx];
        const auto& tpl = selected[cell.template_idx];
        const auto& inst = instances[cell.instance_idx];

        bool cached = cache.load(cell.key, cell);
        bool retrying_failure = cached && cell.gen.error.has_value() && !cell.gen_retry_done;
        bool need_fresh = !cached || retrying_failure;
        if (config.judge_only) {
            if (!cached) {
                // Reported failed but never stored: a later normal run must
                // see a cache miss here, not a frozen failure.
                cell.gen.template_id = tpl.id;
                cell.gen.instance_id = inst.id;
                cell.gen.model_name = model.model_name;
                cell.gen.error = "no cached generation (judge-only mode sends none)";
                cell.gen_done = true;
            }
            need_fresh = false;
        }
        if (need_fresh) {
            std::string prompt = templates::render(tpl, inst).text;
            if (config.inject_instance_sentinel) prompt = with_sentinel(prompt, inst.id);
            modelclient::GenerationRecord fresh;
            try {
                auto transport = gen_factory(model);
                fresh = modelclient::generate(*transport, model, config.gen_params, prompt,
                                              tpl.id, inst.id);
            } catch (const Error& e) {
                fresh.template_id = tpl.id;
                fresh.instance_id = inst.id;
                fresh.model_name = model.model_name;
                fresh.error = e.what();
                fresh.attempts = 1;
            }
            cell.gen = std::move(fresh);
            cell.gen_done = true;
            if (retrying_failure) {
                cell.gen_retry_done = true;
                // A retried generation invalidates any previous judgement.
                cell.has_judge = false;
                cell.js = judge::JudgeScore{};
                cell.judge_model.clear();
                cell.judge_error.clear();
                cell.judge_retry_done = false;
            }
            cache.store(cell);
        }

        std::size_t done = completed.fetch_add(1) + 1;
        if (config.abort_after_cells && done >= *config.abort_after_cells &&
            !interrupted.exchange(true))
            throw RunInterrupted("interrupted after " + std::to_string(done) + " cells");
    });

    // ---------- Stage 2: judge everything ----------
    if (!config.skip_judge) {
        const auto& judge_cfg = *config.judge;
        parallel_for(cells.size(), config.judge_concurrency, [&](std::size_t i) {
            CellState& cell = cells[i];
            if (cell.gen.error) return;
            const auto& inst = instances[cell.instance_idx];

            if (cell.has_judge && cell.judge_model == judge_cfg.model_name) {
                bool failed =
                    cell.js.parse_status == judge::ParseStatus::failed || !cell.judge_error.empty();
                if (!failed) return;            // good verdict cached
                if (cell.judge_retry_done) return;  // failed twice, frozen
                cell.judge_retry_done = true;
            } else if (cell.has_judge) {
                cell.judge_retry_done = false;  // different judge model, fresh slate
            }

            std::string answer = cell.gen.answer_text;
            if (config.inject_instance_sentinel) answer = with_sentinel(answer, inst.id);
            try {
                auto transport = judge_factory(judge_cfg);
                cell.js = judge::judge_answer(*transport, judge_cfg, inst.question,
                                              inst.ground_truth, answer);
                cell.judge_error.clear();
            } catch (const Error& e) {
                cell.js = judge::JudgeScore{};
                cell.js.parse_status = judge::ParseStatus::failed;
                cell.judge_error = e.what();
            }
            cell.has_judge = true;
            cell.judge_model = judge_cfg.model_name;
            cache.store(cell);
        });
    }

    // ---------- Scored records, aggregates, exports ----------
    RunResult result;
    result.cell_count = cells.size();
    result.records.reserve(cells.size());
    for (const auto& cell : cells) {
        metrics::ScoredRecord rec;
        rec.template_id = selected[cell.template_idx].id;
        rec.instance_id = instances[cell.instance_idx].id;
        rec.model_name = config.models[cell.model_idx].model_name;
        rec.latency_s = cell.gen.latency_s;
        if (cell.gen.error) {
            rec.failed = true;
        } else if (!config.skip_judge) {
            if (cell.js.value) rec.accuracy = *cell.js.value;
            else rec.failed = true;
        }
        if (rec.failed) ++result.failed_cells;
        result.records.push_back(std::move(rec));
    }
    result.aggregates = metrics::aggregate(result.records);

    manifest.cell_count = cells.size();
    manifest.finished_at = utc_timestamp(config.fixed_clock);
    result.manifest = manifest;

    if (!config.out_dir.empty()) {
        std::set<std::string> used_names;
        for (const auto& model : config.models) {
            std::vector<metrics::PromptAggregate> mine;
            for (const auto& agg : result.aggregates)
                if (agg.model_name == model.model_name) mine.push_back(agg);
            if (mine.empty()) continue;
            auto board = metrics::rank(mine, metrics::RankKey::accuracy);
            std::string name = sanitize_dir_name(model.model_name);
            while (!used_names.insert(name).second) name += "_2";
            reporting::export_leaderboard(board, manifest,
                                          (fs::path(config.out_dir) / name).string());
        }
    }
    return result;
}

std::vector<metrics::ScoredRecord> scan_cache(const std::string& cache_dir) {
    if (!fs::is_directory(cache_dir))
        throw ConfigError("not a cache directory: " + cache_dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(cache_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<metrics::ScoredRecord> records;
    for (const auto& path : files) {
        json doc = json::parse(read_file(path.string()), nullptr, false);
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("key")) continue;
        CellState cell;
        if (!cell_from_json(doc, doc["key"].get<std::string>(), cell)) continue;
        metrics::ScoredRecord rec;
        rec.template_id = cell.gen.template_id;
        rec.instance_id = cell.gen.instance_id;
        rec.model_name = cell.gen.model_name;
        rec.latency_s = cell.gen.latency_s;
        if (cell.gen.error) {
            rec.failed = true;
        } else if (cell.has_judge) {
            if (cell.js.value) rec.accuracy = *cell.js.value;
            else rec.failed = true;
        }
        records.push_back(std::move(rec));
    }
    return records;
}

// ---------- Reference-table verification ----------

TableVerification verify_tables(const std::string& fixture_path, double tolerance) {
    std::istringstream in(normalize_newlines(read_file(fixture_path)));
    std::string header;
    if (!std::getline(in, header)) throw DatasetError("fixture is empty: " + fixture_path);

    std::vector<std::string> columns = split(trim(header), ',');
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < columns.size(); ++i) index[trim(columns[i])] = i;
    for (const char* required : {"prompt_method", "accuracy", "time_s", "efficiency"})
        if (index.find(required) == index.end())
            throw DatasetError(std::string("fixture is missing column '") + required +
                               "': " + fixture_path);

    TableVerification report;
    report.pass = true;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split(line, ',');
        if (fields.size() != columns.size())
            throw DatasetError("fixture line " + std::to_string(line_no) +
                               ": expected " + std::to_string(columns.size()) + " fields");
        TableRowCheck row;
        row.prompt_method = trim(fields[index["prompt_method"]]);
        auto number = [&](const char* col) {
            auto v = parse_double(fields[index[col]]);
            if (!v)
                throw DatasetError("fixture line " + std::to_string(line_no) + ": bad " +
                                   col + " value '" + fields[index[col]] + "'");
            return *v;
        };
        row.accuracy = number("accuracy");
        row.time_s = number("time_s");
        row.printed_efficiency = number("efficiency");
        if (row.time_s <= 0.0)
            throw DatasetError("fixture line " + std::to_string(line_no) +
                               ": time_s must be positive");
        row.recomputed_efficiency = row.accuracy / row.time_s;
        row.residual = std::abs(row.recomputed_efficiency - row.printed_efficiency);
        row.ok = row.residual <= tolerance + 1e-12;
        if (!row.ok && report.first_failure.empty()) {
            report.pass = false;
            report.first_failure = row.prompt_method;
        }
        report.rows.push_back(std::move(row));
    }
    if (report.rows.empty()) throw DatasetError("fixture has no data rows: " + fixture_path);
    return report;
}

}  // namespace rageval::runner

// rageval: benchmark prompt strategies for RAG question answering against
// OpenAI-compatible chat endpoints, score the answers with a judge model,
// and export accuracy/latency/efficiency leaderboards.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <set>

#include <CLI11.hpp>

#include "rageval/common.hpp"
#include "rageval/corpus.hpp"
#include "rageval/judge.hpp"
#include "rageval/metrics.hpp"
#include "rageval/mock.hpp"
#include "rageval/modelclient.hpp"
#include "rageval/reporting.hpp"
#include "rageval/runner.hpp"
#include "rageval/templates.hpp"

namespace {

using namespace rageval;

struct RunFlags {
    std::string dataset;
    std::string out_dir;
    std::string cache_dir;
    std::string templates_dir;
    std::vector<std::string> template_ids;
    std::vector<std::string> model_urls;
    std::vector<std::string> model_names;
    std::string model_key_env = "MODEL_API_KEY";
    std::string judge_url;
    std::string judge_model = "gpt-4o-mini";
    std::string judge_key_env = "JUDGE_API_KEY";
    std::size_t limit = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int concurrency = 1;
    int judge_concurrency = 1;
    double temperature = 0.0;
    int max_tokens = 1024;
    double timeout_s = 120.0;
    int max_retries = 3;
    int repeats = 1;
    bool skip_judge = false;
    bool use_mock = false;
    std::string mock_fixture;
    bool fixed_clock = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool dataset_required) {
    auto* dataset = cmd->add_option("--dataset", f.dataset, "QA dataset (JSONL)");
    if (dataset_required) dataset->required();
    cmd->add_option("--out", f.out_dir, "output directory for exports")->required();
    cmd->add_option("--cache-dir", f.cache_dir, "cell cache directory (enables resume)");
    cmd->add_option("--templates", f.template_ids, "template ids to run (default: all)")
        ->delimiter(',');
    cmd->add_option("--templates-dir", f.templates_dir, "directory with extra .tpl files");
    cmd->add_option("--model-url", f.model_urls, "model endpoint base URL (repeatable)");
    cmd->add_option("--model-name", f.model_names, "model name (one per --model-url)");
    cmd->add_option("--model-key-env", f.model_key_env,
                    "env var holding the model API key ('' for keyless endpoints)");
    cmd->add_option("--judge-url", f.judge_url, "judge endpoint base URL");
    cmd->add_option("--judge-model", f.judge_model, "judge model name");
    cmd->add_option("--judge-key-env", f.judge_key_env,
                    "env var holding the judge API key ('' for keyless endpoints)");
    cmd->add_option("--limit", f.limit, "use only this many instances");
    cmd->add_option("--seed", f.seed, "with --limit: sample instead of truncating")
        ->each([&f](const std::string&) { f.seed_set = true; });
    cmd->add_option("--concurrency", f.concurrency, "parallel generation requests");
    cmd->add_option("--judge-concurrency", f.judge_concurrency, "parallel judge requests");
    cmd->add_option("--temperature", f.temperature, "sampling temperature");
    cmd->add_option("--max-tokens", f.max_tokens, "max new tokens per answer");
    cmd->add_option("--timeout", f.timeout_s, "per-request timeout in seconds");
    cmd->add_option("--max-retries", f.max_retries, "extra attempts on transient failures");
    cmd->add_option("--repeats", f.repeats, "times to run each cell");
    cmd->add_flag("--skip-judge", f.skip_judge, "generate and time only, no scoring");
    cmd->add_flag("--mock", f.use_mock, "run against built-in loopback mock endpoints");
    cmd->add_option("--mock-fixture", f.mock_fixture, "mock behavior fixture (JSONL)");
    cmd->add_flag("--fixed-clock", f.fixed_clock, "zero manifest timestamps (reproducible runs)");
}

struct MockPair {
    std::unique_ptr<mock::MockServer> generator;
    std::unique_ptr<mock::MockServer> judge;
};

runner::RunConfig to_run_config(const RunFlags& f, MockPair& mocks) {
    runner::RunConfig cfg;
    cfg.dataset_path = f.dataset;
    cfg.out_dir = f.out_dir;
    cfg.cache_dir = f.cache_dir;
    cfg.templates_dir = f.templates_dir;
    cfg.template_filter = f.template_ids;
    if (f.limit > 0) cfg.limit = f.limit;
    if (f.seed_set) cfg.sample_seed = f.seed;
    cfg.concurrency = f.concurrency;
    cfg.judge_concurrency = f.judge_concurrency;
    cfg.gen_params.temperature = f.temperature;
    cfg.gen_params.max_new_tokens = f.max_tokens;
    cfg.skip_judge = f.skip_judge;
    cfg.repeats = f.repeats;
    cfg.fixed_clock = f.fixed_clock;

    if (f.use_mock) {
        mock::MockBehavior behavior;
        if (!f.mock_fixture.empty()) behavior = mock::load_mock_behavior(f.mock_fixture);
        mocks.generator =
            std::make_unique<mock::MockServer>(behavior, mock::MockRole::generator);
        modelclient::ModelEndpointConfig model;
        model.base_url = mocks.generator->base_url();
        model.model_name = f.model_names.empty() ? behavior.model_name : f.model_names[0];
        model.api_key_env = "";
        cfg.models.push_back(model);
        if (!f.skip_judge) {
            mocks.judge = std::make_unique<mock::MockServer>(behavior, mock::MockRole::judge);
            modelclient::ModelEndpointConfig judge_cfg;
            judge_cfg.base_url = mocks.judge->base_url();
            judge_cfg.model_name = "mock-judge";
            judge_cfg.api_key_env = "";
            cfg.judge = judge_cfg;
        }
        cfg.inject_instance_sentinel = true;
        return cfg;
    }

    if (f.model_urls.empty())
        throw ConfigError("at least one --model-url is required (or use --mock)");
    if (f.model_urls.size() != f.model_names.size())
        throw ConfigError("--model-url and --model-name counts must match");
    for (std::size_t i = 0; i < f.model_urls.size(); ++i) {
        modelclient::ModelEndpointConfig model;
        model.base_url = f.model_urls[i];
        model.model_name = f.model_names[i];
        model.api_key_env = f.model_key_env == "none" ? "" : f.model_key_env;
        model.timeout_s = f.timeout_s;
        model.max_retries = f.max_retries;
        cfg.models.push_back(model);
    }
    if (!f.skip_judge) {
        if (f.judge_url.empty())
            throw ConfigError("--judge-url is required (or --skip-judge)");
        modelclient::ModelEndpointConfig judge_cfg;
        judge_cfg.base_url = f.judge_url;
        judge_cfg.model_name = f.judge_model;
        judge_cfg.api_key_env = f.judge_key_env == "none" ? "" : f.judge_key_env;
        judge_cfg.timeout_s = f.timeout_s;
        judge_cfg.max_retries = f.max_retries;
        cfg.judge = judge_cfg;
    }
    return cfg;
}

int print_run_summary(const runner::RunResult& result) {
    std::printf("cells: %zu  ok: %zu  failed: %zu\n", result.cell_count,
                result.cell_count - result.failed_cells, result.failed_cells);
    std::set<std::string> models;
    for (const auto& agg : result.aggregates) models.insert(agg.model_name);
    for (const auto& model : models) {
        std::vector<metrics::PromptAggregate> mine;
        for (const auto& agg : result.aggregates)
            if (agg.model_name == model) mine.push_back(agg);
        auto board = metrics::rank(mine, metrics::RankKey::accuracy);
        std::printf("\n%s (top 5 by accuracy)\n%s", model.c_str(),
                    reporting::render_table(board, 5).c_str());
    }
    return result.failed_cells > 0 ? 2 : 0;
}

int cmd_list_templates(const std::string& templates_dir) {
    auto print = [](const templates::PromptTemplate& t) {
        std::printf("%-45s %-15s %-11s %s\n", t.id.c_str(),
                    templates::category_name(t.category).c_str(),
                    t.context_mode == templates::ContextMode::monolithic ? "monolithic"
                                                                         : "enumerated",
                    t.reconstructed ? "reconstructed" : "verbatim");
    };
    std::printf("%-45s %-15s %-11s %s\n", "id", "category", "context", "body");
    for (const auto& t : templates::registry()) print(t);
    if (!templates_dir.empty())
        for (const auto& t : templates::load_template_dir(templates_dir)) print(t);
    return 0;
}

int cmd_probe(const RunFlags& f) {
    bool all_ok = true;
    auto probe_one = [&all_ok](const modelclient::ModelEndpointConfig& cfg, const char* kind) {
        auto health = modelclient::probe_endpoint(cfg);
        if (health.reachable) {
            std::printf("%s %s: reachable (reports model '%s')\n", kind, cfg.base_url.c_str(),
                        health.reported_model.c_str());
        } else {
            std::printf("%s %s: UNREACHABLE (%s)\n", kind, cfg.base_url.c_str(),
                        health.error.c_str());
            all_ok = false;
        }
    };
    if (f.model_urls.size() != f.model_names.size())
        throw ConfigError("--model-url and --model-name counts must match");
    for (std::size_t i = 0; i < f.model_urls.size(); ++i) {
        modelclient::ModelEndpointConfig cfg;
        cfg.base_url = f.model_urls[i];
        cfg.model_name = f.model_names[i];
        cfg.api_key_env = f.model_key_env == "none" ? "" : f.model_key_env;
        cfg.timeout_s = f.timeout_s;
        probe_one(cfg, "model");
    }
    if (!f.judge_url.empty()) {
        modelclient::ModelEndpointConfig cfg;
        cfg.base_url = f.judge_url;
        cfg.model_name = f.judge_model;
        cfg.api_key_env = f.judge_key_env == "none" ? "" : f.judge_key_env;
        cfg.timeout_s = f.timeout_s;
        probe_one(cfg, "judge");
    }
    if (f.model_urls.empty() && f.judge_url.empty())
        throw ConfigError("nothing to probe: give --model-url and/or --judge-url");
    return all_ok ? 0 : 1;
}

int cmd_verify_tables(const std::vector<std::string>& fixtures, double tolerance) {
    bool all_pass = true;
    for (const auto& path : fixtures) {
        auto report = runner::verify_tables(path, tolerance);
        std::printf("%s\n", path.c_str());
        for (const auto& row : report.rows)
            std::printf("  %-45s printed %.3f recomputed %.4f residual %.4f %s\n",
                        row.prompt_method.c_str(), row.printed_efficiency,
                        row.recomputed_efficiency, row.residual, row.ok ? "ok" : "FAIL");
        std::printf("%s: %s (%zu rows)\n", path.c_str(), report.pass ? "PASS" : "FAIL",
                    report.rows.size());
        all_pass = all_pass && report.pass;
    }
    return all_pass ? 0 : 1;
}

int cmd_render(const std::string& template_id, const std::string& dataset_path,
               const std::string& instance_id, const std::string& templates_dir,
               const std::string& out_path) {
    const templates::PromptTemplate* tpl = nullptr;
    for (const auto& t : templates::registry())
        if (t.id == template_id) tpl = &t;
    std::vector<templates::PromptTemplate> extra;
    if (!templates_dir.empty()) {
        extra = templates::load_template_dir(templates_dir);
        for (const auto& t : extra)
            if (t.id == template_id) tpl = &t;
    }
    if (tpl == nullptr) throw TemplateError("no such template: " + template_id);

    auto dataset = corpus::load_dataset(dataset_path);
    const corpus::QaInstance* inst = nullptr;
    if (instance_id.empty()) {
        inst = &dataset.instances.front();
    } else {
        for (const auto& candidate : dataset.instances)
            if (candidate.id == instance_id) inst = &candidate;
        if (inst == nullptr) throw DatasetError("no such instance id: " + instance_id);
    }
    auto rendered = templates::render(*tpl, *inst);
    if (out_path.empty()) std::fputs(rendered.text.c_str(), stdout);
    else write_file(out_path, rendered.text);
    return 0;
}

int cmd_report(const std::string& cache_dir, const std::string& out_dir,
               const std::string& dataset_path) {
    auto records = runner::scan_cache(cache_dir);
    if (records.empty()) throw ConfigError("cache holds no readable cells: " + cache_dir);
    auto aggregates = metrics::aggregate(records);

    reporting::RunManifest manifest;
    manifest.harness_version = RAGEVAL_VERSION;
    manifest.timing_mode = "serial";
    manifest.cell_count = records.size();
    if (!dataset_path.empty()) {
        auto dataset = corpus::load_dataset(dataset_path);
        manifest.dataset_path = dataset_path;
        manifest.dataset_digest = dataset.manifest.content_digest;
        manifest.instance_count = dataset.instances.size();
    }
    std::set<std::string> ids;
    for (const auto& agg : aggregates) ids.insert(agg.template_id);
    manifest.template_ids.assign(ids.begin(), ids.end());

    runner::RunLock lock(out_dir);
    std::set<std::string> models;
    for (const auto& agg : aggregates) models.insert(agg.model_name);
    for (const auto& model : models) {
        std::vector<metrics::PromptAggregate> mine;
        for (const auto& agg : aggregates)
            if (agg.model_name == model) mine.push_back(agg);
        auto board = metrics::rank(mine, metrics::RankKey::accuracy);
        modelclient::ModelEndpointConfig stub;
        stub.model_name = model;
        stub.api_key_env = "";
        manifest.models = {stub};
        reporting::export_leaderboard(
            board, manifest,
            (std::filesystem::path(out_dir) / runner::sanitize_dir_name(model)).string());
    }
    std::printf("re-exported %zu records for %zu model(s) into %s\n", records.size(),
                models.size(), out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prompt-strategy benchmark harness for RAG over small language models"};
    app.require_subcommand(1);

    // list-templates
    std::string list_dir;
    auto* list_cmd = app.add_subcommand("list-templates", "show the template registry");
    list_cmd->add_option("--templates-dir", list_dir, "directory with extra .tpl files");

    // probe
    RunFlags probe_flags;
    auto* probe_cmd = app.add_subcommand("probe", "check endpoint reachability");
    probe_cmd->add_option("--model-url", probe_flags.model_urls, "model endpoint base URL");
    probe_cmd->add_option("--model-name", probe_flags.model_names, "model name");
    probe_cmd->add_option("--model-key-env", probe_flags.model_key_env, "model API key env var");
    probe_cmd->add_option("--judge-url", probe_flags.judge_url, "judge endpoint base URL");
    probe_cmd->add_option("--judge-model", probe_flags.judge_model, "judge model name");
    probe_cmd->add_option("--judge-key-env", probe_flags.judge_key_env, "judge API key env var");
    probe_cmd->add_option("--timeout", probe_flags.timeout_s, "probe timeout in seconds");

    // run
    RunFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "run the full benchmark matrix");
    add_run_flags(run_cmd, run_flags, true);

    // judge: same machinery, generation comes from cache
    RunFlags judge_flags;
    auto* judge_cmd =
        app.add_subcommand("judge", "re-judge cached generations (no generator calls)");
    add_run_flags(judge_cmd, judge_flags, true);

    // report
    std::string report_cache, report_out, report_dataset;
    auto* report_cmd = app.add_subcommand("report", "re-export leaderboards from a cache");
    report_cmd->add_option("--cache-dir", report_cache, "cell cache directory")->required();
    report_cmd->add_option("--out", report_out, "output directory")->required();
    report_cmd->add_option("--dataset", report_dataset, "dataset path to record in the manifest");

    // verify-tables
    std::vector<std::string> fixtures;
    double tolerance = 0.002;
    auto* verify_cmd =
        app.add_subcommand("verify-tables", "check a reference leaderboard's efficiency column");
    verify_cmd->add_option("--fixture", fixtures, "reference CSV (repeatable)")->required();
    verify_cmd->add_option("--tolerance", tolerance, "allowed |printed - recomputed|");

    // render
    std::string render_template, render_dataset, render_instance, render_dir, render_out;
    auto* render_cmd = app.add_subcommand("render", "print one rendered prompt");
    render_cmd->add_option("--template", render_template, "template id")->required();
    render_cmd->add_option("--dataset", render_dataset, "QA dataset (JSONL)")->required();
    render_cmd->add_option("--instance", render_instance, "instance id (default: first)");
    render_cmd->add_option("--templates-dir", render_dir, "directory with extra .tpl files");
    render_cmd->add_option("--out", render_out, "write to file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) return cmd_list_templates(list_dir);
        if (probe_cmd->parsed()) return cmd_probe(probe_flags);
        if (verify_cmd->parsed()) return cmd_verify_tables(fixtures, tolerance);
        if (render_cmd->parsed())
            return cmd_render(render_template, render_dataset, render_instance, render_dir,
                              render_out);
        if (report_cmd->parsed()) return cmd_report(report_cache, report_out, report_dataset);
        if (run_cmd->parsed() || judge_cmd->parsed()) {
            const RunFlags& flags = run_cmd->parsed() ? run_flags : judge_flags;
            MockPair mocks;
            runner::RunConfig cfg = to_run_config(flags, mocks);
            if (judge_cmd->parsed()) {
                if (cfg.cache_dir.empty())
                    throw ConfigError("judge needs --cache-dir with prior generations");
                cfg.skip_probe = true;  // generator may be gone; cache serves it
                cfg.judge_only = true;
            }
            auto result = runner::run_matrix(cfg);
            return print_run_summary(result);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
    return 0;
}

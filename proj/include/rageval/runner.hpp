/// @file runner.hpp
/// @brief Matrix orchestration: templates × instances × models, cached and
/// resumable, plus verification of published leaderboard fixtures.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rageval/corpus.hpp"
#include "rageval/judge.hpp"
#include "rageval/metrics.hpp"
#include "rageval/modelclient.hpp"
#include "rageval/reporting.hpp"
#include "rageval/templates.hpp"

namespace rageval::runner {

/// Creates a transport for one request batch. Called per cell, so HTTP
/// transports stay single-threaded; mock factories can hand out copies that
/// share one call counter.
using TransportFactory = std::function<std::unique_ptr<modelclient::ChatTransport>(
    const modelclient::ModelEndpointConfig&)>;

struct RunConfig {
    std::string dataset_path;
    /// Template ids to run; empty means the whole registry (plus templates_dir).
    std::vector<std::string> template_filter;
    std::string templates_dir;  // optional directory of extra .tpl files
    std::vector<modelclient::ModelEndpointConfig> models;
    std::optional<modelclient::ModelEndpointConfig> judge;
    modelclient::GenParams gen_params;
    int concurrency = 1;
    int judge_concurrency = 1;
    std::optional<std::size_t> limit;
    /// With `limit`, picks a deterministic sample instead of a prefix.
    std::optional<std::uint64_t> sample_seed;
    std::string cache_dir;  // empty disables persistence/resume
    std::string out_dir;    // empty disables exports
    bool skip_judge = false;
    /// Stage 1 reads exclusively from the cache: cells without a cached
    /// generation are reported failed and no generator request is ever sent.
    /// Requires cache_dir. The synthetic failures are not written back, so a
    /// later normal run still generates those cells fresh.
    bool judge_only = false;
    int repeats = 1;
    /// Zeroes manifest timestamps so exports are byte-comparable.
    bool fixed_clock = false;

    // Test hooks.
    bool inject_instance_sentinel = false;  // append "[[instance:<id>]]" for mocks
    bool skip_probe = false;
    TransportFactory transport_factory;        // default: HttpTransport per cell
    TransportFactory judge_transport_factory;  // default: HttpTransport per cell
    /// Throw RunInterrupted once this many generation cells have completed.
    std::optional<std::size_t> abort_after_cells;
};

struct RunResult {
    std::vector<metrics::ScoredRecord> records;
    std::vector<metrics::PromptAggregate> aggregates;
    reporting::RunManifest manifest;
    std::size_t cell_count = 0;
    std::size_t failed_cells = 0;
};

/// Thrown by the abort_after_cells hook; also what a test "kill" looks like.
class RunInterrupted : public Error {
public:
    using Error::Error;
};

/// Stable digest identifying one generation cell. Any change to the gen
/// params or the template body changes the key.
std::string cache_key(const std::string& model_name, const std::string& template_id,
                      const std::string& instance_id, int repeat,
                      const modelclient::GenParams& params, const std::string& template_body);

/// Holds <out_dir>/run.lock for the lifetime of the object; a second lock on
/// the same directory is a ConfigError. A crashed process leaves the file
/// behind; deleting it manually is the documented recovery.
class RunLock {
public:
    explicit RunLock(const std::string& dir);
    ~RunLock();
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    std::string path_;
};

/// Renders, generates and judges every (model, template, instance, repeat)
/// cell. Per-cell failures become failed records, never aborts. With a cache
/// directory, completed cells are never re-sent to an endpoint; failed cells
/// get exactly one retry on resume, then stay frozen.
RunResult run_matrix(const RunConfig& config);

/// Reads every cell file in a cache directory back into scored records, for
/// re-exporting aggregates without touching any endpoint. Unreadable files
/// are skipped; the directory must exist.
std::vector<metrics::ScoredRecord> scan_cache(const std::string& cache_dir);

/// Folds a model name into a safe per-model subdirectory name: lowercase,
/// anything outside [a-z0-9._-] becomes '_'.
std::string sanitize_dir_name(const std::string& name);

// ---------- Reference-table verification ----------

struct TableRowCheck {
    std::string prompt_method;
    double accuracy = 0.0;
    double time_s = 0.0;
    double printed_efficiency = 0.0;
    double recomputed_efficiency = 0.0;
    double residual = 0.0;
    bool ok = false;
};

struct TableVerification {
    bool pass = false;
    std::vector<TableRowCheck> rows;
    std::string first_failure;  // names the offending prompt_method
};

/// Reads a reference leaderboard CSV (columns prompt_method, accuracy,
/// time_s, efficiency in any order), recomputes efficiency as the ratio
/// accuracy / time_s and compares with the printed column per row.
TableVerification verify_tables(const std::string& fixture_path, double tolerance = 0.002);

}  // namespace rageval::runner

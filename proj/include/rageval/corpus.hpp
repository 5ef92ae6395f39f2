/// @file corpus.hpp
/// @brief Multi-hop QA dataset loading, validation, and deterministic sampling.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rageval::corpus {

/// One QA row: a question whose answer requires combining several documents.
struct QaInstance {
    std::string id;
    std::string question;
    std::string ground_truth;
    std::vector<std::string> documents;
};

/// Provenance summary of a loaded dataset. The digest covers the raw file
/// bytes with line endings canonicalized, so the same logical file hashes
/// identically on every platform.
struct DatasetManifest {
    std::string source_path;
    std::size_t instance_count = 0;
    std::string content_digest;   // "fnv1a64:<16 hex digits>"
    std::size_t warning_count = 0;  // unknown fields encountered, not fatal
};

struct Dataset {
    std::vector<QaInstance> instances;
    DatasetManifest manifest;
};

/// Loads a JSONL dataset. Each line is an object with `question`,
/// `ground_truth` and non-empty `documents` (array of strings); `id` is
/// optional and synthesized as "row-<line>" when absent. Blank lines are
/// skipped. Errors carry 1-based line numbers. `limit` > 0 keeps only the
/// first `limit` instances (applied after the whole file validates).
Dataset load_dataset(const std::string& path, std::optional<std::size_t> limit = std::nullopt);

/// Serializes instances back to JSONL (one compact object per line, keys
/// sorted). load(write(load(x))) is byte-stable.
std::string to_jsonl(const std::vector<QaInstance>& instances);
void write_dataset(const std::string& path, const std::vector<QaInstance>& instances);

/// Deterministic sample of n instances, original order preserved.
/// n >= size returns the identity. Same (seed, n, input) always selects the
/// same rows on every platform.
std::vector<QaInstance> sample_instances(const std::vector<QaInstance>& instances, std::size_t n,
                                         std::uint64_t seed);

}  // namespace rageval::corpus

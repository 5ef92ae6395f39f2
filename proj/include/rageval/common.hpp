/// @file common.hpp
/// @brief Shared utilities: errors, hashing, string/number helpers, parallel map.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rageval {

// ---------- Errors ----------

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dataset/fixture file problems (missing file, malformed line, bad field).
class DatasetError : public Error {
public:
    using Error::Error;
};

/// Template registration or rendering problems.
class TemplateError : public Error {
public:
    using Error::Error;
};

/// Invalid run/endpoint configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Endpoint unreachable, timed out, or replied with garbage after retries.
class TransportError : public Error {
public:
    using Error::Error;
};

// ---------- Hashing ----------

/// FNV-1a 64-bit. Stable across platforms, used for content digests and
/// cache keys (not security).
std::uint64_t fnv1a64(std::string_view bytes);

/// Lowercase 16-digit hex of a 64-bit value.
std::string to_hex(std::uint64_t value);

/// Digest of file-like content with line endings canonicalized to "\n".
std::string content_digest(std::string_view bytes);

// ---------- Strings ----------

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Replaces every occurrence of `from` (non-empty) with `to`.
std::string replace_all(std::string s, std::string_view from, std::string_view to);

/// Normalizes "\r\n" and lone "\r" to "\n".
std::string normalize_newlines(std::string_view s);

// ---------- Numbers ----------

/// Fixed-point formatting with '.' separator regardless of locale.
std::string format_fixed(double value, int decimals);

/// Locale-independent strtod over the whole string; nullopt on any trailing junk.
std::optional<double> parse_double(std::string_view s);

// ---------- Files ----------

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);
bool file_exists(const std::string& path);

// ---------- Time ----------

/// UTC timestamp "YYYY-MM-DDTHH:MM:SSZ"; the epoch when `fixed` is set
/// (deterministic-output mode for tests).
std::string utc_timestamp(bool fixed = false);

// ---------- Concurrency ----------

/// Runs fn(0..count-1) on up to `concurrency` worker threads. Exceptions
/// inside fn must be handled by fn itself; a worker that throws anyway
/// stops the whole loop and rethrows in the caller.
void parallel_for(std::size_t count, int concurrency, const std::function<void(std::size_t)>& fn);

}  // namespace rageval

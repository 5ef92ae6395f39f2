/// @file modelclient.hpp
/// @brief Chat-completion client for OpenAI-compatible endpoints.
///
/// The wire protocol is POST <base_url>/chat/completions with a JSON body
/// {model, messages, temperature, max_tokens}; the answer is read from
/// choices[0].message.content. Transports are pluggable so tests can swap
/// the HTTP layer for an in-process fake.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rageval::modelclient {

struct ModelEndpointConfig {
    std::string base_url;     // e.g. "http://localhost:8000/v1"
    std::string model_name;
    /// Name of the environment variable holding the bearer token. Empty means
    /// no Authorization header (local keyless servers). The value itself is
    /// never stored anywhere.
    std::string api_key_env = "MODEL_API_KEY";
    double timeout_s = 120.0;
    int max_retries = 3;        // extra attempts after the first, capped at 5
    int retry_backoff_ms = 250; // doubles per retry

    bool operator==(const ModelEndpointConfig&) const = default;
};

struct GenParams {
    double temperature = 0.0;
    int max_new_tokens = 1024;
    std::vector<std::string> stop_sequences;

    bool operator==(const GenParams&) const = default;
};

/// Outcome of one generation call. Exactly one of answer_text / error is
/// meaningful: a record either carries a non-empty answer or an error string.
struct GenerationRecord {
    std::string template_id;
    std::string instance_id;
    std::string model_name;
    std::string answer_text;
    std::optional<std::string> error;
    double latency_s = 0.0;  // final attempt only, monotonic clock
    int attempts = 0;
};

/// One raw exchange with an endpoint. `status` 0 means the request never got
/// an HTTP response (connect failure, timeout); `body` then holds the reason.
struct ChatReply {
    int status = 0;
    std::string body;
    /// Set by fake transports that simulate latency; generate() reports it
    /// instead of wall time so cached runs stay byte-identical.
    std::optional<double> synthetic_latency_s;
};

/// A single request attempt. Implementations do no retrying themselves.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual ChatReply send(const std::string& request_body_json) = 0;
};

/// Real HTTP transport. Resolves the bearer token from cfg.api_key_env at
/// construction; throws ConfigError when the variable is named but unset.
class HttpTransport : public ChatTransport {
public:
    explicit HttpTransport(const ModelEndpointConfig& cfg);
    ~HttpTransport() override;
    ChatReply send(const std::string& request_body_json) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Splits "http://host:8080/v1" into client root and path prefix, so the
/// request path becomes "/v1/chat/completions".
struct ParsedBaseUrl {
    std::string client_root;  // scheme://host[:port]
    std::string path_prefix;  // "" or "/v1" etc., no trailing slash
};
ParsedBaseUrl parse_base_url(const std::string& base_url);

/// Canonical request body: keys sorted, compact separators. Byte-identical
/// across runs and platforms for identical inputs (cache keys depend on it).
std::string build_request_body(const std::string& model_name, const std::string& prompt,
                               const GenParams& params);

/// Full call with retry policy: transient failures (connect errors, timeouts,
/// HTTP 429/5xx) are retried with exponential backoff up to cfg.max_retries;
/// other 4xx and malformed bodies fail immediately. An HTTP 200 with empty
/// content yields an "empty completion" error without retry.
GenerationRecord generate(ChatTransport& transport, const ModelEndpointConfig& cfg,
                          const GenParams& params, const std::string& prompt,
                          const std::string& template_id = "",
                          const std::string& instance_id = "");

struct HealthReport {
    bool reachable = false;
    std::string reported_model;  // from the response "model" field, may be empty
    std::string error;
};

/// One-token probe request; retries once on transport failure.
HealthReport probe(ChatTransport& transport, const ModelEndpointConfig& cfg);
HealthReport probe_endpoint(const ModelEndpointConfig& cfg);

}  // namespace rageval::modelclient

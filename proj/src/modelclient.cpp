#include "rageval/modelclient.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

// CPPHTTPLIB_OPENSSL_SUPPORT comes from the build when OpenSSL is available.
#include <httplib.h>
#include <json.hpp>

#include "rageval/common.hpp"

namespace rageval::modelclient {

using nlohmann::json;

ParsedBaseUrl parse_base_url(const std::string& base_url) {
    std::string url = trim(base_url);
    if (url.empty()) throw ConfigError("base_url is empty");
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("base_url must include a scheme: " + base_url);
    std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https")
        throw ConfigError("unsupported scheme '" + scheme + "' in " + base_url);
    std::size_t path_start = url.find('/', scheme_end + 3);
    ParsedBaseUrl out;
    if (path_start == std::string::npos) {
        out.client_root = url;
    } else {
        out.client_root = url.substr(0, path_start);
        out.path_prefix = url.substr(path_start);
        while (!out.path_prefix.empty() && out.path_prefix.back() == '/')
            out.path_prefix.pop_back();
    }
    if (out.client_root.size() <= scheme_end + 3)
        throw ConfigError("base_url has no host: " + base_url);
    return out;
}

std::string build_request_body(const std::string& model_name, const std::string& prompt,
                               const GenParams& params) {
    json body;
    body["model"] = model_name;
    body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_new_tokens;
    if (!params.stop_sequences.empty()) body["stop"] = params.stop_sequences;
    // nlohmann::json orders keys lexicographically; dump() is then canonical.
    return body.dump();
}

// ---------- HttpTransport ----------

struct HttpTransport::Impl {
    ModelEndpointConfig cfg;
    ParsedBaseUrl url;
    std::string bearer;  // held for the lifetime of the transport only
    httplib::Client client;

    Impl(const ModelEndpointConfig& c, ParsedBaseUrl u, std::string token)
        : cfg(c), url(std::move(u)), bearer(std::move(token)), client(url.client_root) {
        auto timeout = std::chrono::milliseconds(
            static_cast<long long>(cfg.timeout_s * 1000.0));
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        client.set_keep_alive(true);
    }
};

HttpTransport::HttpTransport(const ModelEndpointConfig& cfg) {
    ParsedBaseUrl url = parse_base_url(cfg.base_url);
    std::string token;
    if (!cfg.api_key_env.empty()) {
        const char* value = std::getenv(cfg.api_key_env.c_str());
        if (value == nullptr || *value == '\0')
            throw ConfigError("credential environment variable is not set: " + cfg.api_key_env);
        token = value;
    }
    impl_ = std::make_unique<Impl>(cfg, std::move(url), std::move(token));
}

HttpTransport::~HttpTransport() = default;

ChatReply HttpTransport::send(const std::string& request_body_json) {
    httplib::Headers headers;
    if (!impl_->bearer.empty())
        headers.emplace("Authorization", "Bearer " + impl_->bearer);
    std::string path = impl_->url.path_prefix + "/chat/completions";
    auto res = impl_->client.Post(path, headers, request_body_json, "application/json");
    ChatReply reply;
    if (!res) {
        reply.status = 0;
        reply.body = "connection failed: " + httplib::to_string(res.error());
        return reply;
    }
    reply.status = res->status;
    reply.body = res->body;
    return reply;
}

// ---------- Retry wrapper ----------

namespace {

bool transient_status(int status) {
    return status == 0 || status == 429 || (status >= 500 && status < 600);
}

/// Returns the assistant message text, or an error description.
struct ParsedCompletion {
    bool ok = false;
    std::string content;
    std::string model;
    std::string error;
};

ParsedCompletion parse_completion(const std::string& body) {
    ParsedCompletion out;
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        out.error = "malformed response body";
        return out;
    }
    if (doc.contains("model") && doc["model"].is_string())
        out.model = doc["model"].get<std::string>();
    if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
        out.error = "response has no choices";
        return out;
    }
    const json& first = doc["choices"][0];
    if (!first.contains("message") || !first["message"].contains("content") ||
        !first["message"]["content"].is_string()) {
        out.error = "response choice has no message content";
        return out;
    }
    out.ok = true;
    out.content = first["message"]["content"].get<std::string>();
    return out;
}

}  // namespace

GenerationRecord generate(ChatTransport& transport, const ModelEndpointConfig& cfg,
                          const GenParams& params, const std::string& prompt,
                          const std::string& template_id, const std::string& instance_id) {
    if (params.temperature < 0.0 || params.temperature > 2.0)
        throw ConfigError("temperature must be in [0, 2]");
    if (params.max_new_tokens < 1) throw ConfigError("max_new_tokens must be >= 1");
    int max_retries = std::min(cfg.max_retries, 5);
    if (max_retries < 0) max_retries = 0;

    GenerationRecord rec;
    rec.template_id = template_id;
    rec.instance_id = instance_id;
    rec.model_name = cfg.model_name;

    std::string body = build_request_body(cfg.model_name, prompt, params);
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        ++rec.attempts;
        auto t0 = std::chrono::steady_clock::now();
        ChatReply reply = transport.send(body);
        auto t1 = std::chrono::steady_clock::now();
        rec.latency_s = reply.synthetic_latency_s
                            ? *reply.synthetic_latency_s
                            : std::chrono::duration<double>(t1 - t0).count();

        if (reply.status == 200) {
            ParsedCompletion parsed = parse_completion(reply.body);
            if (!parsed.ok) {
                rec.error = parsed.error;
                return rec;
            }
            if (parsed.content.empty()) {
                rec.error = "empty completion";
                return rec;
            }
            rec.answer_text = parsed.content;
            rec.error.reset();
            return rec;
        }

        bool retryable = transient_status(reply.status) && attempt < max_retries;
        std::string why = reply.status == 0
                              ? reply.body
                              : "HTTP " + std::to_string(reply.status);
        if (!retryable) {
            rec.error = why;
            return rec;
        }
        auto backoff = std::chrono::milliseconds(
            static_cast<long long>(cfg.retry_backoff_ms) << attempt);
        std::this_thread::sleep_for(backoff);
    }
    rec.error = "retry budget exhausted";  // unreachable, loop always returns
    return rec;
}

HealthReport probe(ChatTransport& transport, const ModelEndpointConfig& cfg) {
    GenParams params;
    params.temperature = 0.0;
    params.max_new_tokens = 1;
    std::string body = build_request_body(cfg.model_name, "ping", params);
    HealthReport report;
    for (int attempt = 0; attempt < 2; ++attempt) {
        ChatReply reply = transport.send(body);
        if (reply.status == 200) {
            ParsedCompletion parsed = parse_completion(reply.body);
            report.reachable = true;
            report.reported_model = parsed.model;
            return report;
        }
        report.error = reply.status == 0 ? reply.body : "HTTP " + std::to_string(reply.status);
        if (!transient_status(reply.status)) break;
    }
    report.reachable = false;
    return report;
}

HealthReport probe_endpoint(const ModelEndpointConfig& cfg) {
    try {
        HttpTransport transport(cfg);
        return probe(transport, cfg);
    } catch (const Error& e) {
        HealthReport report;
        report.error = e.what();
        return report;
    }
}

}  // namespace rageval::modelclient

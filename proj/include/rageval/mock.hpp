/// @file mock.hpp
/// @brief Deterministic stand-ins for generator and judge endpoints.
///
/// Two flavors share one behavior model: MockTransport short-circuits the
/// wire entirely (fast, byte-deterministic, synthetic latency), MockServer
/// speaks real HTTP on a loopback port (exercises the full client stack,
/// measured latency). Canned answers are keyed by instance id, which the
/// runner smuggles into prompts as a "[[instance:<id>]]" sentinel.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rageval/modelclient.hpp"

namespace rageval::mock {

enum class MockRole { generator, judge };

enum class JudgeMode {
    lookup,   // score by instance id from judge_scores
    overlap,  // Jaccard token overlap of ground truth vs answer
};

struct MockBehavior {
    std::map<std::string, std::string> answers;  // instance id -> canned answer
    std::string default_answer = "No canned answer for this instance.";
    std::map<std::string, double> judge_scores;  // instance id -> score
    double default_judge_score = 0.50;
    JudgeMode judge_mode = JudgeMode::overlap;
    /// Served verbatim in order before any other behavior kicks in; lets
    /// tests script malformed judge replies followed by clean ones.
    std::vector<std::string> scripted_replies;
    std::string model_name = "mock-model";
    int delay_ms = 0;
    int fail_first_n = 0;     // serve HTTP 503 for the first N requests
    bool empty_content = false;
};

/// Loads behavior from a JSONL fixture: records tagged "config", "answer",
/// "judge_score" or "scripted_reply".
MockBehavior load_mock_behavior(const std::string& path);

std::optional<std::string> extract_sentinel(const std::string& text);
std::string strip_sentinels(const std::string& text);

/// |A ∩ B| / |A ∪ B| over unique lowercased alphanumeric tokens. Both empty
/// yields 1.0 (nothing asked, nothing missed).
double jaccard_overlap(const std::string& a, const std::string& b);

/// Request-independent state machine used by both mock flavors.
class MockCore {
public:
    MockCore(MockBehavior behavior, MockRole role);
    ~MockCore();

    /// Consumes one request body, returns (http_status, response_body).
    std::pair<int, std::string> handle(const std::string& request_body_json);

    int requests_total() const;
    const MockBehavior& behavior() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// In-process transport: no sockets, no sleeps. Latency is reported
/// synthetically as delay_ms / 1000, so repeated runs produce identical
/// records.
class MockTransport : public modelclient::ChatTransport {
public:
    MockTransport(MockBehavior behavior, MockRole role);
    modelclient::ChatReply send(const std::string& request_body_json) override;
    int requests_total() const;

private:
    std::shared_ptr<MockCore> core_;
};

/// Loopback HTTP server on an ephemeral 127.0.0.1 port. Handles POST
/// */chat/completions, sleeping delay_ms before each reply.
class MockServer {
public:
    MockServer(MockBehavior behavior, MockRole role);
    ~MockServer();
    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    std::string base_url() const;  // "http://127.0.0.1:<port>"
    int requests_total() const;
    /// Authorization header of the most recent request, empty if none.
    std::string last_auth_header() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace rageval::mock

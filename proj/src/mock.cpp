#include "rageval/mock.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

// CPPHTTPLIB_OPENSSL_SUPPORT comes from the build when OpenSSL is available.
#include <httplib.h>
#include <json.hpp>

#include "rageval/common.hpp"

namespace rageval::mock {

using nlohmann::json;

namespace {

constexpr const char* kSentinelOpen = "[[instance:";
constexpr const char* kSentinelClose = "]]";

std::set<std::string> token_set(const std::string& text) {
    std::set<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            tokens.insert(current);
            current.clear();
        }
    }
    if (!current.empty()) tokens.insert(current);
    return tokens;
}

/// Pulls the text between two anchors of the judge prompt layout.
std::string section_between(const std::string& prompt, const std::string& begin,
                            const std::string& end) {
    std::size_t b = prompt.find(begin);
    if (b == std::string::npos) return "";
    b += begin.size();
    std::size_t e = prompt.find(end, b);
    if (e == std::string::npos) e = prompt.size();
    return trim(prompt.substr(b, e - b));
}

std::string build_chat_response(const std::string& model, const std::string& content) {
    json body;
    body["id"] = "mock-cmpl";
    body["object"] = "chat.completion";
    body["model"] = model;
    body["choices"] = json::array({json{
        {"index", 0},
        {"message", json{{"role", "assistant"}, {"content", content}}},
        {"finish_reason", "stop"},
    }});
    return body.dump();
}

}  // namespace

std::optional<std::string> extract_sentinel(const std::string& text) {
    std::size_t open = text.find(kSentinelOpen);
    if (open == std::string::npos) return std::nullopt;
    std::size_t start = open + std::string(kSentinelOpen).size();
    std::size_t close = text.find(kSentinelClose, start);
    if (close == std::string::npos) return std::nullopt;
    return text.substr(start, close - start);
}

std::string strip_sentinels(const std::string& text) {
    std::string out = text;
    while (true) {
        std::size_t open = out.find(kSentinelOpen);
        if (open == std::string::npos) return out;
        std::size_t close = out.find(kSentinelClose, open);
        if (close == std::string::npos) return out;
        out.erase(open, close + std::string(kSentinelClose).size() - open);
    }
}

double jaccard_overlap(const std::string& a, const std::string& b) {
    std::set<std::string> sa = token_set(a);
    std::set<std::string> sb = token_set(b);
    if (sa.empty() && sb.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& t : sa)
        if (sb.count(t)) ++inter;
    std::size_t uni = sa.size() + sb.size() - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

MockBehavior load_mock_behavior(const std::string& path) {
    MockBehavior b;
    std::istringstream in(normalize_newlines(read_file(path)));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("type"))
            throw DatasetError("mock fixture line " + std::to_string(line_no) +
                               ": expected an object with a 'type' field");
        std::string type = obj["type"].get<std::string>();
        if (type == "config") {
            if (obj.contains("default_answer")) b.default_answer = obj["default_answer"];
            if (obj.contains("default_judge_score"))
                b.default_judge_score = obj["default_judge_score"];
            if (obj.contains("model_name")) b.model_name = obj["model_name"];
            if (obj.contains("delay_ms")) b.delay_ms = obj["delay_ms"];
            if (obj.contains("fail_first_n")) b.fail_first_n = obj["fail_first_n"];
            if (obj.contains("judge_mode")) {
                std::string mode = obj["judge_mode"];
                if (mode == "lookup") b.judge_mode = JudgeMode::lookup;
                else if (mode == "overlap") b.judge_mode = JudgeMode::overlap;
                else
                    throw DatasetError("mock fixture line " + std::to_string(line_no) +
                                       ": unknown judge_mode: " + mode);
            }
        } else if (type == "answer") {
            b.answers[obj.at("instance_id").get<std::string>()] =
                obj.at("text").get<std::string>();
        } else if (type == "judge_score") {
            b.judge_scores[obj.at("instance_id").get<std::string>()] =
                obj.at("value").get<double>();
        } else if (type == "scripted_reply") {
            b.scripted_replies.push_back(obj.at("text").get<std::string>());
        } else {
            throw DatasetError("mock fixture line " + std::to_string(line_no) +
                               ": unknown record type: " + type);
        }
    }
    return b;
}

// ---------- MockCore ----------

struct MockCore::Impl {
    MockBehavior behavior;
    MockRole role;
    std::atomic<int> requests{0};
    std::atomic<int> failures_left{0};
    std::size_t script_pos = 0;
    std::mutex script_mutex;
};

MockCore::MockCore(MockBehavior behavior, MockRole role) : impl_(std::make_unique<Impl>()) {
    impl_->behavior = std::move(behavior);
    impl_->role = role;
    impl_->failures_left = impl_->behavior.fail_first_n;
}

MockCore::~MockCore() = default;

int MockCore::requests_total() const { return impl_->requests.load(); }

const MockBehavior& MockCore::behavior() const { return impl_->behavior; }

std::pair<int, std::string> MockCore::handle(const std::string& request_body_json) {
    impl_->requests.fetch_add(1);
    if (impl_->failures_left.fetch_sub(1) > 0)
        return {503, R"({"error":"mock transient failure"})"};
    impl_->failures_left.store(0);

    json req = json::parse(request_body_json, nullptr, false);
    if (req.is_discarded() || !req.contains("messages") || !req["messages"].is_array() ||
        req["messages"].empty())
        return {400, R"({"error":"bad request"})"};
    std::string prompt = req["messages"][0].value("content", "");
    std::string model = req.value("model", impl_->behavior.model_name);

    const MockBehavior& b = impl_->behavior;
    if (b.empty_content) return {200, build_chat_response(b.model_name, "")};

    {
        std::lock_guard<std::mutex> lock(impl_->script_mutex);
        if (impl_->script_pos < b.scripted_replies.size()) {
            const std::string& scripted = b.scripted_replies[impl_->script_pos++];
            return {200, build_chat_response(b.model_name, scripted)};
        }
    }

    std::string content;
    if (impl_->role == MockRole::generator) {
        auto id = extract_sentinel(prompt);
        if (id && b.answers.count(*id)) content = b.answers.at(*id);
        else content = b.default_answer;
    } else {
        double score = b.default_judge_score;
        if (b.judge_mode == JudgeMode::lookup) {
            auto id = extract_sentinel(prompt);
            if (id && b.judge_scores.count(*id)) score = b.judge_scores.at(*id);
        } else {
            std::string truth = section_between(prompt, "GROUND TRUTH:", "RAG ANSWER:");
            std::string answer =
                section_between(prompt, "RAG ANSWER:", "Your Numeric Evaluation");
            score = jaccard_overlap(strip_sentinels(truth), strip_sentinels(answer));
        }
        content = format_fixed(score, 2);
    }
    return {200, build_chat_response(b.model_name, content)};
}

// ---------- MockTransport ----------

MockTransport::MockTransport(MockBehavior behavior, MockRole role)
    : core_(std::make_shared<MockCore>(std::move(behavior), role)) {}

modelclient::ChatReply MockTransport::send(const std::string& request_body_json) {
    auto [status, body] = core_->handle(request_body_json);
    modelclient::ChatReply reply;
    reply.status = status;
    reply.body = body;
    reply.synthetic_latency_s = core_->behavior().delay_ms / 1000.0;
    return reply;
}

int MockTransport::requests_total() const { return core_->requests_total(); }

// ---------- MockServer ----------

struct MockServer::Impl {
    MockCore core;
    httplib::Server server;
    std::thread worker;
    int port = 0;
    std::mutex auth_mutex;
    std::string last_auth;

    Impl(MockBehavior behavior, MockRole role) : core(std::move(behavior), role) {}
};

MockServer::MockServer(MockBehavior behavior, MockRole role)
    : impl_(std::make_unique<Impl>(std::move(behavior), role)) {
    Impl* impl = impl_.get();
    auto handler = [impl](const httplib::Request& req, httplib::Response& res) {
        {
            std::lock_guard<std::mutex> lock(impl->auth_mutex);
            impl->last_auth = req.get_header_value("Authorization");
        }
        int delay = impl->core.behavior().delay_ms;
        if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        auto [status, body] = impl->core.handle(req.body);
        res.status = status;
        res.set_content(body, "application/json");
    };
    impl->server.Post(R"(.*/chat/completions)", handler);
    impl->port = impl->server.bind_to_any_port("127.0.0.1");
    if (impl->port <= 0) throw TransportError("mock server could not bind a loopback port");
    impl->worker = std::thread([impl] { impl->server.listen_after_bind(); });
    impl->server.wait_until_ready();
}

MockServer::~MockServer() {
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

std::string MockServer::base_url() const {
    return "http://127.0.0.1:" + std::to_string(impl_->port);
}

int MockServer::requests_total() const { return impl_->core.requests_total(); }

std::string MockServer::last_auth_header() const {
    std::lock_guard<std::mutex> lock(impl_->auth_mutex);
    return impl_->last_auth;
}

}  // namespace rageval::mock

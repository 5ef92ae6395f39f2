#include <doctest.h>

#include <cstdlib>
#include <deque>

#include "rageval/common.hpp"
#include "rageval/mock.hpp"
#include "rageval/modelclient.hpp"
#include "test_support.hpp"

using namespace rageval;
using namespace rageval::modelclient;

namespace {

/// Serves a fixed sequence of replies, then repeats the last one.
struct ScriptedTransport : ChatTransport {
    std::deque<ChatReply> script;
    int calls = 0;

    explicit ScriptedTransport(std::deque<ChatReply> s) : script(std::move(s)) {}

    ChatReply send(const std::string&) override {
        ++calls;
        ChatReply r = script.front();
        if (script.size() > 1) script.pop_front();
        return r;
    }
};

ChatReply ok_reply(const std::string& content) {
    ChatReply r;
    r.status = 200;
    r.body = std::string(R"({"choices":[{"message":{"role":"assistant","content":")") + content +
             R"("}}],"model":"scripted"})";
    return r;
}

ModelEndpointConfig fast_cfg() {
    ModelEndpointConfig cfg;
    cfg.base_url = "http://scripted.invalid";
    cfg.model_name = "scripted";
    cfg.api_key_env = "";
    cfg.max_retries = 2;
    cfg.retry_backoff_ms = 1;
    return cfg;
}

}  // namespace

TEST_SUITE("modelclient") {

TEST_CASE("parse_base_url splits root and path prefix") {
    auto p = parse_base_url("http://localhost:8000/v1");
    CHECK(p.client_root == "http://localhost:8000");
    CHECK(p.path_prefix == "/v1");

    p = parse_base_url("https://api.example.com");
    CHECK(p.client_root == "https://api.example.com");
    CHECK(p.path_prefix == "");

    p = parse_base_url("http://127.0.0.1:9999/serve/v1/");
    CHECK(p.client_root == "http://127.0.0.1:9999");
    CHECK(p.path_prefix == "/serve/v1");

    CHECK_THROWS_AS((void)parse_base_url("ftp://example.com"), ConfigError);
    CHECK_THROWS_AS((void)parse_base_url("http://"), ConfigError);
    CHECK_THROWS_AS((void)parse_base_url(""), ConfigError);
}

TEST_CASE("request body bytes are canonical") {
    GenParams params;
    params.temperature = 0.0;
    params.max_new_tokens = 16;
    CHECK(build_request_body("m", "hi", params) ==
          R"({"max_tokens":16,"messages":[{"content":"hi","role":"user"}],"model":"m","temperature":0.0})");

    params.stop_sequences = {"\n\n"};
    CHECK(build_request_body("m", "hi", params) ==
          R"({"max_tokens":16,"messages":[{"content":"hi","role":"user"}],"model":"m","stop":["\n\n"],"temperature":0.0})");
}

TEST_CASE("generate happy path") {
    ScriptedTransport t({ok_reply("The Seine")});
    auto rec = generate(t, fast_cfg(), GenParams{}, "prompt", "tpl", "inst");
    CHECK(!rec.error.has_value());
    CHECK(rec.answer_text == "The Seine");
    CHECK(rec.attempts == 1);
    CHECK(rec.template_id == "tpl");
    CHECK(rec.instance_id == "inst");
    CHECK(rec.model_name == "scripted");
    CHECK(rec.latency_s >= 0.0);
}

TEST_CASE("synthetic latency is reported verbatim") {
    auto reply = ok_reply("x");
    reply.synthetic_latency_s = 0.125;
    ScriptedTransport t({reply});
    auto rec = generate(t, fast_cfg(), GenParams{}, "p");
    CHECK(rec.latency_s == doctest::Approx(0.125));
}

TEST_CASE("transient failures retry with backoff, permanent ones do not") {
    SUBCASE("503 then success") {
        ChatReply fail;
        fail.status = 503;
        fail.body = "overloaded";
        ScriptedTransport t({fail, ok_reply("ok")});
        auto rec = generate(t, fast_cfg(), GenParams{}, "p");
        CHECK(!rec.error.has_value());
        CHECK(rec.attempts == 2);
    }
    SUBCASE("connect failure then success") {
        ChatReply fail;
        fail.status = 0;
        fail.body = "connection refused";
        ScriptedTransport t({fail, ok_reply("ok")});
        auto rec = generate(t, fast_cfg(), GenParams{}, "p");
        CHECK(!rec.error.has_value());
        CHECK(rec.attempts == 2);
    }
    SUBCASE("429 then success") {
        ChatReply fail;
        fail.status = 429;
        ScriptedTransport t({fail, ok_reply("ok")});
        auto rec = generate(t, fast_cfg(), GenParams{}, "p");
        CHECK(!rec.error.has_value());
        CHECK(rec.attempts == 2);
    }
    SUBCASE("404 fails immediately") {
        ChatReply fail;
        fail.status = 404;
        fail.body = "no such route";
        ScriptedTransport t({fail, ok_reply("never reached")});
        auto rec = generate(t, fast_cfg(), GenParams{}, "p");
        REQUIRE(rec.error.has_value());
        CHECK(rec.error->find("404") != std::string::npos);
        CHECK(rec.attempts == 1);
        CHECK(t.calls == 1);
    }
    SUBCASE("exhausted retries surface the last error") {
        ChatReply fail;
        fail.status = 503;
        ScriptedTransport t({fail});
        auto cfg = fast_cfg();  // max_retries 2 -> 3 attempts
        auto rec = generate(t, cfg, GenParams{}, "p");
        REQUIRE(rec.error.has_value());
        CHECK(rec.attempts == 3);
        CHECK(t.calls == 3);
    }
}

TEST_CASE("malformed and empty bodies fail without retry") {
    SUBCASE("unparseable json") {
        ChatReply bad;
        bad.status = 200;
        bad.body = "not json at all";
        ScriptedTransport t({bad, ok_reply("never")});
        auto rec = generate(t, fast_cfg(), GenParams{}, "p");
        REQUIRE(rec.error.has_value());
        CHECK(t.calls == 1);
    }
    SUBCASE("missing choices") {
        ChatReply bad;
        bad.status = 200;
        bad.body = R"({"object":"chat.completion"})";
        ScriptedTransport t({bad});
        auto rec = generate(t, fast_cfg(), GenParams{}, "p");
        REQUIRE(rec.error.has_value());
        CHECK(t.calls == 1);
    }
    SUBCASE("empty completion") {
        ScriptedTransport t({ok_reply("")});
        auto rec = generate(t, fast_cfg(), GenParams{}, "p");
        REQUIRE(rec.error.has_value());
        CHECK(rec.error->find("empty completion") != std::string::npos);
        CHECK(t.calls == 1);
    }
}

TEST_CASE("generation parameter validation") {
    ScriptedTransport t({ok_reply("x")});
    GenParams params;
    params.temperature = 2.5;
    CHECK_THROWS_AS((void)generate(t, fast_cfg(), params, "p"), ConfigError);
    params.temperature = -0.1;
    CHECK_THROWS_AS((void)generate(t, fast_cfg(), params, "p"), ConfigError);
    params.temperature = 0.0;
    params.max_new_tokens = 0;
    CHECK_THROWS_AS((void)generate(t, fast_cfg(), params, "p"), ConfigError);
    CHECK(t.calls == 0);
}

TEST_CASE("http transport resolves credentials from the named env var") {
    ModelEndpointConfig cfg;
    cfg.base_url = "http://127.0.0.1:1";
    cfg.model_name = "m";

    cfg.api_key_env = "RAGEVAL_TEST_ABSENT_KEY";
    ::unsetenv("RAGEVAL_TEST_ABSENT_KEY");
    CHECK_THROWS_AS(HttpTransport{cfg}, ConfigError);
    try {
        HttpTransport probe_it{cfg};
    } catch (const ConfigError& e) {
        // the message names the variable, never any value
        CHECK(std::string(e.what()).find("RAGEVAL_TEST_ABSENT_KEY") != std::string::npos);
    }

    ::setenv("RAGEVAL_TEST_ABSENT_KEY", "sekrit-value", 1);
    CHECK_NOTHROW(HttpTransport{cfg});
    ::unsetenv("RAGEVAL_TEST_ABSENT_KEY");

    cfg.api_key_env = "";  // keyless endpoint
    CHECK_NOTHROW(HttpTransport{cfg});
}

TEST_CASE("http transport talks to a loopback server") {
    mock::MockBehavior behavior;
    behavior.answers["i1"] = "Canned answer one.";
    mock::MockServer server(behavior, mock::MockRole::generator);

    ModelEndpointConfig cfg;
    cfg.base_url = server.base_url();
    cfg.model_name = "mock-model";
    cfg.api_key_env = "RAGEVAL_TEST_LOOPBACK_KEY";
    ::setenv("RAGEVAL_TEST_LOOPBACK_KEY", "sekrit", 1);

    HttpTransport transport(cfg);
    auto rec = generate(transport, cfg, GenParams{}, "question text\n[[instance:i1]]");
    CHECK(!rec.error.has_value());
    CHECK(rec.answer_text == "Canned answer one.");
    CHECK(server.requests_total() == 1);
    CHECK(server.last_auth_header() == "Bearer sekrit");
    ::unsetenv("RAGEVAL_TEST_LOOPBACK_KEY");
}

TEST_CASE("http retry against a flaky loopback server") {
    mock::MockBehavior behavior;
    behavior.fail_first_n = 1;
    mock::MockServer server(behavior, mock::MockRole::generator);

    ModelEndpointConfig cfg;
    cfg.base_url = server.base_url();
    cfg.model_name = "mock-model";
    cfg.api_key_env = "";
    cfg.max_retries = 2;
    cfg.retry_backoff_ms = 1;

    HttpTransport transport(cfg);
    auto rec = generate(transport, cfg, GenParams{}, "p");
    CHECK(!rec.error.has_value());
    CHECK(rec.attempts == 2);
    CHECK(server.requests_total() == 2);
}

TEST_CASE("probe reports the server model") {
    mock::MockBehavior behavior;
    mock::MockServer server(behavior, mock::MockRole::generator);

    ModelEndpointConfig cfg;
    cfg.base_url = server.base_url();
    cfg.model_name = "whatever";
    cfg.api_key_env = "";
    auto health = probe_endpoint(cfg);
    CHECK(health.reachable);
    CHECK(health.reported_model == "mock-model");

    cfg.base_url = "http://127.0.0.1:1";  // nothing listens there
    cfg.max_retries = 0;
    cfg.timeout_s = 2.0;
    auto dead = probe_endpoint(cfg);
    CHECK(!dead.reachable);
    CHECK(!dead.error.empty());
}

}  // TEST_SUITE

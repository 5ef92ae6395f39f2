#include <doctest.h>

#include <algorithm>
#include <random>

#include "rageval/common.hpp"
#include "rageval/judge.hpp"
#include "rageval/mock.hpp"
#include "test_support.hpp"

using namespace rageval;
using namespace rageval::judge;

namespace {

DimensionScores uniform_scores(double s) {
    return {{"semantic_alignment", s},
            {"information_accuracy", s},
            {"logical_coherence", s},
            {"response_completeness", s},
            {"practical_utility", s}};
}

modelclient::ModelEndpointConfig judge_cfg() {
    modelclient::ModelEndpointConfig cfg;
    cfg.base_url = "http://judge.invalid";
    cfg.model_name = "mock-judge";
    cfg.api_key_env = "";
    cfg.max_retries = 0;
    cfg.retry_backoff_ms = 1;
    return cfg;
}

}  // namespace

TEST_SUITE("judge") {

TEST_CASE("default weight profile is the shipped protocol") {
    const auto& profile = default_weight_profile();
    CHECK_NOTHROW(profile.validate());
    REQUIRE(profile.weights.size() == 5);
    CHECK(profile.weights.at("semantic_alignment") == doctest::Approx(0.35));
    CHECK(profile.weights.at("information_accuracy") == doctest::Approx(0.25));
    CHECK(profile.weights.at("logical_coherence") == doctest::Approx(0.20));
    CHECK(profile.weights.at("response_completeness") == doctest::Approx(0.15));
    CHECK(profile.weights.at("practical_utility") == doctest::Approx(0.05));
}

TEST_CASE("profile validation rejects broken weights") {
    WeightProfile p;
    CHECK_THROWS_AS(p.validate(), ConfigError);  // empty
    p.weights = {{"a", 0.5}, {"b", 0.6}};
    CHECK_THROWS_AS(p.validate(), ConfigError);  // sums to 1.1
    p.weights = {{"a", 1.5}, {"b", -0.5}};
    CHECK_THROWS_AS(p.validate(), ConfigError);  // negative weight
    p.weights = {{"a", 0.5}, {"b", 0.5}};
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("weighted_sum identity on uniform scores") {
    const auto& profile = default_weight_profile();
    for (double s : {0.0, 0.25, 0.5, 1.0})
        CHECK(weighted_sum(uniform_scores(s), profile) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("weighted_sum one-hot recovers each weight") {
    const auto& profile = default_weight_profile();
    for (const auto& [dim, weight] : profile.weights) {
        auto scores = uniform_scores(0.0);
        scores[dim] = 1.0;
        CHECK(weighted_sum(scores, profile) == doctest::Approx(weight).epsilon(1e-12));
    }
}

TEST_CASE("weighted_sum input validation") {
    const auto& profile = default_weight_profile();
    auto scores = uniform_scores(0.5);
    scores.erase("logical_coherence");
    try {
        weighted_sum(scores, profile);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("logical_coherence") != std::string::npos);
    }
    scores = uniform_scores(0.5);
    scores["semantic_alignment"] = 1.2;
    CHECK_THROWS_AS((void)weighted_sum(scores, profile), ConfigError);
    scores["semantic_alignment"] = -0.1;
    CHECK_THROWS_AS((void)weighted_sum(scores, profile), ConfigError);
}

TEST_CASE("weighted_sum is monotonic and bounded") {
    const auto& profile = default_weight_profile();
    std::mt19937_64 rng(7);
    auto unit = [&rng] { return static_cast<double>(rng() % 1000) / 999.0; };
    for (int i = 0; i < 1000; ++i) {
        DimensionScores low, high;
        double lo_min = 1.0, lo_max = 0.0;
        for (const auto& [dim, weight] : profile.weights) {
            double a = unit();
            double bump = (1.0 - a) * unit();
            low[dim] = a;
            high[dim] = a + bump;
            lo_min = std::min(lo_min, a);
            lo_max = std::max(lo_max, a);
        }
        double s_low = weighted_sum(low, profile);
        double s_high = weighted_sum(high, profile);
        CHECK(s_high >= s_low - 1e-12);      // raising any dimension never lowers the sum
        CHECK(s_low >= lo_min - 1e-12);      // bounded by the extremes
        CHECK(s_low <= lo_max + 1e-12);
        CHECK(s_low >= 0.0);
        CHECK(s_low <= 1.0);
    }
}

TEST_CASE("judge prompt splices inputs verbatim") {
    auto prompt = build_judge_prompt("Why is the sky blue?", "Rayleigh scattering",
                                     "Because of scattering.");
    CHECK(prompt.rfind("You are an expert evaluator", 0) == 0);
    CHECK(prompt.find("QUESTION:\n\nWhy is the sky blue?") != std::string::npos);
    CHECK(prompt.find("GROUND TRUTH:\n\nRayleigh scattering") != std::string::npos);
    CHECK(prompt.find("RAG ANSWER:\n\nBecause of scattering.") != std::string::npos);
    CHECK(prompt.find("<<") == std::string::npos);  // no leftover splice markers
    const std::string tail = "Your Numeric Evaluation (0.000 to 1.000):";
    CHECK(prompt.substr(prompt.size() - tail.size()) == tail);
}

TEST_CASE("judge prompt states the same weights the offline profile uses") {
    auto prompt = build_judge_prompt("q", "g", "a");
    CHECK(prompt.find("SEMANTIC_ALIGNMENT (35%)") != std::string::npos);
    CHECK(prompt.find("INFORMATION_ACCURACY (25%)") != std::string::npos);
    CHECK(prompt.find("LOGICAL_COHERENCE (20%)") != std::string::npos);
    CHECK(prompt.find("RESPONSE_COMPLETENESS (15%)") != std::string::npos);
    CHECK(prompt.find("PRACTICAL_UTILITY (5%)") != std::string::npos);
}

TEST_CASE("judge prompt never re-expands marker-shaped input") {
    auto prompt = build_judge_prompt("q", "g", "sneaky <<ground_truth>> marker");
    CHECK(prompt.find("RAG ANSWER:\n\nsneaky <<ground_truth>> marker") != std::string::npos);
    CHECK_THROWS_AS((void)build_judge_prompt("", "g", "a"), ConfigError);
    CHECK_THROWS_AS((void)build_judge_prompt("q", "", "a"), ConfigError);
    CHECK_THROWS_AS((void)build_judge_prompt("q", "g", ""), ConfigError);
}

TEST_CASE("lenient score parsing") {
    CHECK(parse_score("0.85") == doctest::Approx(0.85));
    CHECK(parse_score(" 0.45\n") == doctest::Approx(0.45));
    CHECK_THROWS_AS((void)parse_score("1.50"), ScoreParseError);

    CHECK(parse_score("Score: 0.72") == doctest::Approx(0.72));
    CHECK(parse_score("I'd say 0.9, maybe 0.95") == doctest::Approx(0.9));
    CHECK(parse_score("0.999") == doctest::Approx(0.999));
    CHECK(parse_score("rating 1") == doctest::Approx(1.0));

    // long float dumps are skipped, the next clean token decides
    CHECK(parse_score("0.8499999999 so 0.85") == doctest::Approx(0.85));

    CHECK_THROWS_AS((void)parse_score("no numbers here"), ScoreParseError);
    CHECK_THROWS_AS((void)parse_score(""), ScoreParseError);
    CHECK_THROWS_AS((void)parse_score("-0.2"), ScoreParseError);
    CHECK_THROWS_AS((void)parse_score("85"), ScoreParseError);  // first token is out of range

    bool exact = false;
    CHECK(parse_score("1.00", &exact) == doctest::Approx(1.0));
    CHECK(exact);
    CHECK(parse_score("0.00", &exact) == doctest::Approx(0.0));
    CHECK(exact);
    CHECK(parse_score("0.50", &exact) == doctest::Approx(0.5));
    CHECK(!exact);
}

TEST_CASE("strict score parsing accepts only a bare number") {
    CHECK(parse_score_strict("0.85") == doctest::Approx(0.85));
    CHECK(parse_score_strict(" 0.45\n") == doctest::Approx(0.45));
    CHECK_THROWS_AS((void)parse_score_strict("Score: 0.85"), ScoreParseError);
    CHECK_THROWS_AS((void)parse_score_strict("0.8555555"), ScoreParseError);
    CHECK_THROWS_AS((void)parse_score_strict("1.50"), ScoreParseError);
    CHECK_THROWS_AS((void)parse_score_strict("0.85 ok"), ScoreParseError);
    CHECK_THROWS_AS((void)parse_score_strict(""), ScoreParseError);
}

TEST_CASE("format/parse round-trip holds for two-decimal scores") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 500; ++i) {
        double v = static_cast<double>(rng() % 101) / 100.0;
        std::string text = format_fixed(v, 2);
        CHECK(parse_score(text) == doctest::Approx(v).epsilon(1e-9));
        CHECK(parse_score_strict(text) == doctest::Approx(v).epsilon(1e-9));
    }
}

TEST_CASE("parse status names round-trip") {
    for (auto s : {ParseStatus::ok, ParseStatus::retried_ok, ParseStatus::failed})
        CHECK(parse_status_from_name(parse_status_name(s)) == s);
    // Unknown names from a tampered cache degrade to failed, which is what
    // triggers the one retry on resume.
    CHECK(parse_status_from_name("weird") == ParseStatus::failed);
}

TEST_CASE("judge_answer happy path through a mock transport") {
    mock::MockBehavior behavior;
    behavior.judge_mode = mock::JudgeMode::lookup;
    behavior.judge_scores["i1"] = 0.85;
    mock::MockTransport transport(behavior, mock::MockRole::judge);

    auto score = judge_answer(transport, judge_cfg(), "q?", "gt", "answer\n[[instance:i1]]");
    REQUIRE(score.value.has_value());
    CHECK(*score.value == doctest::Approx(0.85));
    CHECK(score.parse_status == ParseStatus::ok);
    CHECK(score.attempts == 1);
    CHECK(!score.warning.has_value());
    CHECK(score.raw_reply == "0.85");
}

TEST_CASE("judge_answer retries unparseable replies leniently") {
    mock::MockBehavior behavior;
    behavior.scripted_replies = {"I think this deserves 0.75 maybe", "Score: 0.75"};
    behavior.judge_mode = mock::JudgeMode::lookup;
    mock::MockTransport transport(behavior, mock::MockRole::judge);

    // first reply fails the strict parse, second one parses leniently
    auto score = judge_answer(transport, judge_cfg(), "q", "g", "a");
    REQUIRE(score.value.has_value());
    CHECK(*score.value == doctest::Approx(0.75));
    CHECK(score.parse_status == ParseStatus::retried_ok);
    CHECK(score.attempts == 2);
}

TEST_CASE("judge_answer gives up after three unusable replies") {
    mock::MockBehavior behavior;
    behavior.scripted_replies = {"nope", "still nope", "words only"};
    behavior.judge_mode = mock::JudgeMode::lookup;
    mock::MockTransport transport(behavior, mock::MockRole::judge);

    auto score = judge_answer(transport, judge_cfg(), "q", "g", "a");
    CHECK(!score.value.has_value());
    CHECK(score.parse_status == ParseStatus::failed);
    CHECK(score.attempts == 3);
    CHECK(score.raw_reply == "words only");
}

TEST_CASE("judge_answer flags exact-bound replies") {
    mock::MockBehavior behavior;
    behavior.scripted_replies = {"1.00"};
    behavior.judge_mode = mock::JudgeMode::lookup;
    mock::MockTransport transport(behavior, mock::MockRole::judge);

    auto score = judge_answer(transport, judge_cfg(), "q", "g", "a");
    REQUIRE(score.value.has_value());
    CHECK(*score.value == doctest::Approx(1.0));
    REQUIRE(score.warning.has_value());
    CHECK(score.warning->find("bound") != std::string::npos);
}

TEST_CASE("judge_answer surfaces transport failures as errors") {
    mock::MockBehavior behavior;
    behavior.fail_first_n = 1000;  // every request 503s
    mock::MockTransport transport(behavior, mock::MockRole::judge);

    CHECK_THROWS_AS((void)judge_answer(transport, judge_cfg(), "q", "g", "a"), TransportError);
}

}  // TEST_SUITE

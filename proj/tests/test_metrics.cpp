#include <doctest.h>

#include <algorithm>
#include <random>

#include "rageval/common.hpp"
#include "rageval/metrics.hpp"

using namespace rageval;
using namespace rageval::metrics;

namespace {

ScoredRecord rec(const std::string& tpl, const std::string& inst, double acc, double lat,
                 const std::string& model = "m1") {
    ScoredRecord r;
    r.template_id = tpl;
    r.instance_id = inst;
    r.model_name = model;
    r.accuracy = acc;
    r.latency_s = lat;
    return r;
}

ScoredRecord failed_rec(const std::string& tpl, const std::string& inst,
                        const std::string& model = "m1") {
    ScoredRecord r;
    r.template_id = tpl;
    r.instance_id = inst;
    r.model_name = model;
    r.failed = true;
    return r;
}

PromptAggregate agg_of(const std::string& tpl, double acc, double time,
                       const std::string& model = "m1") {
    PromptAggregate a;
    a.template_id = tpl;
    a.model_name = model;
    a.n_ok = 1;
    a.avg_accuracy = acc;
    a.avg_time_s = time;
    if (time > 0) a.efficiency = acc / time;
    return a;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("aggregate averages per (model, template) and counts failures") {
    std::vector<ScoredRecord> records = {
        rec("t1", "i1", 0.8, 1.0),
        rec("t1", "i2", 0.9, 3.0),
        failed_rec("t1", "i3"),
        rec("t2", "i1", 0.5, 2.0),
    };
    auto aggs = aggregate(records);
    REQUIRE(aggs.size() == 2);

    const auto& t1 = aggs[0];
    CHECK(t1.template_id == "t1");
    CHECK(t1.n_ok == 2);
    CHECK(t1.n_failed == 1);
    CHECK(*t1.avg_accuracy == doctest::Approx(0.85));
    CHECK(*t1.avg_time_s == doctest::Approx(2.0));
    // efficiency is the ratio of means, not the mean of ratios
    CHECK(*t1.efficiency == doctest::Approx(0.425));

    const auto& t2 = aggs[1];
    CHECK(t2.template_id == "t2");
    CHECK(t2.n_ok == 1);
    CHECK(*t2.efficiency == doctest::Approx(0.25));
}

TEST_CASE("aggregate keeps zero-ok groups visible") {
    auto aggs = aggregate({failed_rec("t1", "i1"), failed_rec("t1", "i2")});
    REQUIRE(aggs.size() == 1);
    CHECK(aggs[0].n_ok == 0);
    CHECK(aggs[0].n_failed == 2);
    CHECK(!aggs[0].avg_accuracy.has_value());
    CHECK(!aggs[0].avg_time_s.has_value());
    CHECK(!aggs[0].efficiency.has_value());
}

TEST_CASE("aggregate is insensitive to record order") {
    std::vector<ScoredRecord> records;
    std::mt19937_64 rng(11);
    for (int t = 0; t < 5; ++t)
        for (int i = 0; i < 40; ++i)
            records.push_back(rec("t" + std::to_string(t), "i" + std::to_string(i),
                                  static_cast<double>(rng() % 1000) / 999.0,
                                  0.1 + static_cast<double>(rng() % 100) / 10.0));
    auto baseline = aggregate(records);
    for (int round = 0; round < 5; ++round) {
        std::shuffle(records.begin(), records.end(), rng);
        auto shuffled = aggregate(records);
        REQUIRE(shuffled.size() == baseline.size());
        for (std::size_t k = 0; k < baseline.size(); ++k) {
            CHECK(shuffled[k].template_id == baseline[k].template_id);
            // bitwise equality: summation order is pinned internally
            CHECK(*shuffled[k].avg_accuracy == *baseline[k].avg_accuracy);
            CHECK(*shuffled[k].avg_time_s == *baseline[k].avg_time_s);
            CHECK(*shuffled[k].efficiency == *baseline[k].efficiency);
        }
    }
}

TEST_CASE("aggregate skips accuracy-less records for accuracy but keeps their latency") {
    ScoredRecord r;
    r.template_id = "t";
    r.instance_id = "i";
    r.model_name = "m1";
    r.latency_s = 2.0;  // judge-less run
    auto aggs = aggregate({r});
    REQUIRE(aggs.size() == 1);
    CHECK(aggs[0].n_ok == 1);
    CHECK(!aggs[0].avg_accuracy.has_value());
    CHECK(*aggs[0].avg_time_s == doctest::Approx(2.0));
    CHECK(!aggs[0].efficiency.has_value());
}

TEST_CASE("rank by accuracy, efficiency, and time") {
    std::vector<PromptAggregate> aggs = {
        agg_of("slow_strong", 0.9, 10.0),
        agg_of("fast_weak", 0.5, 0.5),
        agg_of("balanced", 0.8, 2.0),
    };

    auto by_acc = rank(aggs, RankKey::accuracy);
    CHECK(by_acc.model_name == "m1");
    REQUIRE(by_acc.entries.size() == 3);
    CHECK(by_acc.entries[0].stats.template_id == "slow_strong");
    CHECK(by_acc.entries[0].rank == 1);
    CHECK(by_acc.entries[2].stats.template_id == "fast_weak");
    CHECK(by_acc.entries[2].rank == 3);

    auto by_time = rank(aggs, RankKey::time);
    CHECK(by_time.entries[0].stats.template_id == "fast_weak");

    auto by_eff = rank(aggs, RankKey::efficiency);
    CHECK(by_eff.entries[0].stats.template_id == "fast_weak");  // 1.0/s beats 0.4 and 0.09
}

TEST_CASE("rank breaks ties lexicographically and sinks missing keys") {
    std::vector<PromptAggregate> aggs = {
        agg_of("zebra", 0.8, 1.0),
        agg_of("alpha", 0.8, 2.0),
    };
    PromptAggregate no_key;
    no_key.template_id = "broken";
    no_key.model_name = "m1";
    no_key.n_failed = 3;
    aggs.push_back(no_key);

    auto lb = rank(aggs, RankKey::accuracy);
    REQUIRE(lb.entries.size() == 3);
    CHECK(lb.entries[0].stats.template_id == "alpha");
    CHECK(lb.entries[1].stats.template_id == "zebra");
    CHECK(lb.entries[2].stats.template_id == "broken");
}

TEST_CASE("rank refuses mixed models and handles empty input") {
    CHECK(rank({}, RankKey::accuracy).entries.empty());
    std::vector<PromptAggregate> mixed = {agg_of("t1", 0.5, 1.0, "m1"),
                                          agg_of("t2", 0.6, 1.0, "m2")};
    CHECK_THROWS_AS((void)rank(mixed, RankKey::accuracy), ConfigError);
}

TEST_CASE("baseline_delta subtracts the baseline accuracy") {
    std::vector<PromptAggregate> aggs = {
        agg_of("base", 0.768, 1.186),
        agg_of("best", 0.830, 13.485),
        agg_of("worst", 0.682, 13.795),
    };
    auto deltas = baseline_delta(aggs, "base");
    CHECK(deltas.at("best") == doctest::Approx(0.062).epsilon(1e-9));
    CHECK(deltas.at("worst") == doctest::Approx(-0.086).epsilon(1e-9));
    CHECK(deltas.at("base") == doctest::Approx(0.0));

    CHECK_THROWS_AS((void)baseline_delta(aggs, "missing_baseline"), ConfigError);

    std::vector<PromptAggregate> mixed = {agg_of("base", 0.7, 1.0, "m1"),
                                          agg_of("t", 0.8, 1.0, "m2")};
    CHECK_THROWS_AS((void)baseline_delta(mixed, "base"), ConfigError);
}

}  // TEST_SUITE

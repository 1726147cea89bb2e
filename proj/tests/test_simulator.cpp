#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <vector>

#include "beepsim/simulator.hpp"

using namespace beep;

namespace {

bool same_result(const RunResult& a, const RunResult& b) {
    return a.protocol == b.protocol && a.variant == b.variant && a.n == b.n &&
           a.seed == b.seed && a.phases == b.phases && a.slots == b.slots &&
           a.size_min == b.size_min && a.size_max == b.size_max &&
           a.correct == b.correct && a.aborted == b.aborted &&
           a.k_disagreement_phases == b.k_disagreement_phases && a.sizes == b.sizes;
}

}  // namespace

TEST_CASE("a single node counts itself") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto res = run_protocol(Protocol::BcdL, 1, kBcdL, seed);
        CHECK(res.correct);
        CHECK_FALSE(res.aborted);
        CHECK(res.size_min == 1);
        CHECK(res.size_max == 1);
        CHECK(res.phases >= 1);
        CHECK(res.slots == res.phases * 3);
    }
}

TEST_CASE("a single node works in the monte carlo protocol too") {
    const auto res = run_protocol(Protocol::BLMonteCarlo, 1, kBL, 7,
                                  RunConfig{.emulation_rounds = 3});
    CHECK(res.correct);
    CHECK(res.sizes == std::vector<std::uint32_t>{1});
}

TEST_CASE("identical arguments give identical results") {
    RunConfig cfg;
    cfg.record_phases = true;
    for (Protocol p : {Protocol::BcdL, Protocol::BcdLcd, Protocol::BLcd}) {
        const auto a = run_protocol(p, 9, required_variant(p), 4242, cfg);
        const auto b = run_protocol(p, 9, required_variant(p), 4242, cfg);
        CHECK(same_result(a, b));
        REQUIRE(a.phase_trace.size() == b.phase_trace.size());
        for (std::size_t i = 0; i < a.phase_trace.size(); ++i) {
            CHECK(a.phase_trace[i].slot_beepers == b.phase_trace[i].slot_beepers);
            CHECK(a.phase_trace[i].k_after == b.phase_trace[i].k_after);
        }
    }
}

TEST_CASE("scratch reuse does not leak state between runs") {
    RunScratch scratch;
    const auto first = run_protocol(Protocol::BcdL, 6, kBcdL, 11, {}, scratch);
    run_protocol(Protocol::BLcd, 13, kBLcd, 99, {}, scratch);  // different shape
    const auto again = run_protocol(Protocol::BcdL, 6, kBcdL, 11, {}, scratch);
    CHECK(same_result(first, again));
    const auto fresh = run_protocol(Protocol::BcdL, 6, kBcdL, 11);
    CHECK(same_result(first, fresh));
}

TEST_CASE("wrong variant is rejected") {
    CHECK_THROWS_AS(run_protocol(Protocol::BcdL, 4, kBL, 1), ConfigError);
    CHECK_THROWS_AS(run_protocol(Protocol::BcdLcd, 4, kBcdL, 1), ConfigError);
    CHECK_THROWS_AS(run_protocol(Protocol::BLMonteCarlo, 4, kBcdLcd, 1), ConfigError);
}

TEST_CASE("degenerate configurations are rejected") {
    CHECK_THROWS_AS(run_protocol(Protocol::BcdL, 0, kBcdL, 1), ConfigError);
    CHECK_THROWS_AS(run_protocol(Protocol::BLcd, 1, kBLcd, 1), ConfigError);
    CHECK_THROWS_AS(run_protocol(Protocol::BLMonteCarlo, 4, kBL, 1), ConfigError);
    CHECK_THROWS_AS(run_protocol(Protocol::BLMonteCarlo, 4, kBL, 1,
                                 RunConfig{.emulation_rounds = 65}),
                    ConfigError);
}

TEST_CASE("phase cap turns a long run into an abort, never a wrong count") {
    RunConfig cfg;
    cfg.phase_cap = 2;
    const auto res = run_protocol(Protocol::BcdL, 8, kBcdL, 3, cfg);
    CHECK(res.aborted);
    CHECK_FALSE(res.correct);
    CHECK(res.phases == 2);
    CHECK(res.slots == 6);
}

TEST_CASE("phase trace covers every phase exactly once") {
    RunConfig cfg;
    cfg.record_phases = true;
    const auto res = run_protocol(Protocol::BcdLcd, 5, kBcdLcd, 21, cfg);
    REQUIRE(res.phase_trace.size() == res.phases);
    std::uint64_t counted = 0;
    for (std::size_t i = 0; i < res.phase_trace.size(); ++i) {
        CHECK(res.phase_trace[i].phase_index == i + 1);
        counted += res.phase_trace[i].newly_counted;
    }
    CHECK(counted == 5);
    CHECK(res.phase_trace.front().k_before == 2);
    CHECK(res.phase_trace.back().terminated);
}

TEST_CASE("slot trace records the full acoustic history") {
    RunConfig cfg;
    cfg.record_slots = true;
    const auto res = run_protocol(Protocol::BcdL, 3, kBcdL, 5, cfg);
    REQUIRE(res.slot_trace.size() == res.slots);
    for (std::size_t i = 0; i < res.slot_trace.size(); ++i) {
        CHECK(res.slot_trace[i].slot_index == i);
        CHECK(res.slot_trace[i].actions.size() == 3);
        CHECK(res.slot_trace[i].observations.size() == 3);
    }
}

TEST_CASE("sizes are recorded only on request") {
    RunConfig cfg;
    cfg.record_sizes = false;
    const auto res = run_protocol(Protocol::BcdL, 4, kBcdL, 2, cfg);
    CHECK(res.sizes.empty());
    CHECK(res.size_min == 4);  // extremes survive regardless
    CHECK(res.size_max == 4);
}

TEST_CASE("all nodes terminate in the same phase on correct runs") {
    RunConfig cfg;
    cfg.record_phases = true;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto res = run_protocol(Protocol::BLcd, 7, kBLcd, seed, cfg);
        REQUIRE(res.correct);
        // only the last phase may set the terminated flag
        for (std::size_t i = 0; i + 1 < res.phase_trace.size(); ++i)
            CHECK_FALSE(res.phase_trace[i].terminated);
        CHECK(res.phase_trace.back().terminated);
    }
}

TEST_CASE("k stays uniform across uncounted nodes for every protocol") {
    for (std::uint64_t seed = 100; seed < 200; ++seed) {
        CHECK(run_protocol(Protocol::BcdL, 12, kBcdL, seed).k_disagreement_phases == 0);
        CHECK(run_protocol(Protocol::BcdLcd, 12, kBcdLcd, seed).k_disagreement_phases ==
              0);
        CHECK(run_protocol(Protocol::BLcd, 12, kBLcd, seed).k_disagreement_phases == 0);
        CHECK(run_protocol(Protocol::BLMonteCarlo, 12, kBL, seed,
                           RunConfig{.emulation_rounds = 4})
                  .k_disagreement_phases == 0);
    }
}

TEST_CASE("default phase cap scales with n") {
    CHECK(default_phase_cap(1) == 10000);
    CHECK(default_phase_cap(64) == 640000);
}

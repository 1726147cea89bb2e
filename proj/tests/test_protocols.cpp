#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <vector>

#include "beepsim/rng.hpp"
#include "beepsim/simulator.hpp"

using namespace beep;

namespace {

// First-phase beep decision of every node: one bernoulli(1/2) draw each,
// taken from the same stream position the protocols use.
std::vector<bool> first_phase_pattern(std::uint64_t seed, std::uint64_t n) {
    std::vector<bool> beeps(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Stream coins = node_stream(seed, i, StreamPurpose::Coins);
        beeps[i] = coins.bernoulli(0.5);
    }
    return beeps;
}

std::uint64_t seed_with_pattern(std::uint64_t n, const std::vector<bool>& want) {
    for (std::uint64_t seed = 0; seed < 100000; ++seed)
        if (first_phase_pattern(seed, n) == want) return seed;
    REQUIRE(false);
    return 0;
}

RunResult traced_run(Protocol p, std::uint64_t n, std::uint64_t seed, int rounds = 0) {
    RunConfig cfg;
    cfg.emulation_rounds = rounds;
    cfg.record_phases = true;
    return run_protocol(p, n, required_variant(p), seed, cfg);
}

}  // namespace

TEST_CASE("protocol names round-trip") {
    for (Protocol p : {Protocol::BcdL, Protocol::BcdLcd, Protocol::BLcd,
                       Protocol::BLMonteCarlo}) {
        auto parsed = parse_protocol(protocol_name(p));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == p);
    }
    CHECK(protocol_name(Protocol::BLMonteCarlo) == "bl-mc");
    CHECK_FALSE(parse_protocol("bcd").has_value());
    CHECK_FALSE(parse_protocol("").has_value());
}

TEST_CASE("required variant and termination class") {
    CHECK(required_variant(Protocol::BcdL) == kBcdL);
    CHECK(required_variant(Protocol::BcdLcd) == kBcdLcd);
    CHECK(required_variant(Protocol::BLcd) == kBLcd);
    CHECK(required_variant(Protocol::BLMonteCarlo) == kBL);
    CHECK(is_las_vegas(Protocol::BcdL));
    CHECK(is_las_vegas(Protocol::BcdLcd));
    CHECK(is_las_vegas(Protocol::BLcd));
    CHECK_FALSE(is_las_vegas(Protocol::BLMonteCarlo));
}

TEST_CASE("slots per phase") {
    CHECK(slots_per_phase(Protocol::BcdL, 0) == 3);
    CHECK(slots_per_phase(Protocol::BcdLcd, 0) == 2);
    CHECK(slots_per_phase(Protocol::BLcd, 0) == 4);
    CHECK(slots_per_phase(Protocol::BLMonteCarlo, 1) == 4);
    CHECK(slots_per_phase(Protocol::BLMonteCarlo, 4) == 10);
    CHECK(slots_per_phase(Protocol::BLMonteCarlo, 64) == 130);
}

TEST_CASE("bcdl lone contender is counted and announces") {
    const auto seed = seed_with_pattern(2, {true, false});
    const auto res = traced_run(Protocol::BcdL, 2, seed);
    REQUIRE(!res.phase_trace.empty());
    const auto& ph = res.phase_trace[0];
    CHECK(ph.slot_beepers[0] == 1);  // the contender
    CHECK(ph.slot_beepers[1] == 1);  // its announcement
    CHECK(ph.slot_beepers[2] == 1);  // the other node, still uncounted
    CHECK(ph.newly_counted == 1);
    CHECK(ph.k_before == 2);
    CHECK(ph.k_after == 2);  // lone win carries no contention evidence
    CHECK_FALSE(ph.terminated);
    CHECK(res.correct);
    CHECK(res.sizes == std::vector<std::uint32_t>{2, 2});
}

TEST_CASE("bcdl collision raises k, silence holds the floor") {
    auto seed = seed_with_pattern(2, {true, true});
    auto res = traced_run(Protocol::BcdL, 2, seed);
    const auto& collided = res.phase_trace[0];
    CHECK(collided.slot_beepers[0] == 2);
    CHECK(collided.slot_beepers[1] == 0);  // no lone winner, no announcement
    CHECK(collided.newly_counted == 0);
    CHECK(collided.k_before == 2);
    CHECK(collided.k_after == 3);
    REQUIRE(res.phase_trace.size() > 1);
    CHECK(res.phase_trace[1].k_before == 3);

    seed = seed_with_pattern(2, {false, false});
    res = traced_run(Protocol::BcdL, 2, seed);
    const auto& silent = res.phase_trace[0];
    CHECK(silent.slot_beepers[0] == 0);
    CHECK(silent.newly_counted == 0);
    CHECK(silent.k_after == 2);  // k never drops below 2
}

TEST_CASE("bcdl k comes back down after a silent phase above the floor") {
    // find a run whose first phase collides and whose second is silent
    for (std::uint64_t seed = 0; seed < 100000; ++seed) {
        const auto res = traced_run(Protocol::BcdL, 2, seed);
        if (res.phase_trace.size() < 2) continue;
        const auto& a = res.phase_trace[0];
        const auto& b = res.phase_trace[1];
        if (a.slot_beepers[0] == 2 && b.slot_beepers[0] == 0) {
            CHECK(a.k_after == 3);
            CHECK(b.k_before == 3);
            CHECK(b.k_after == 2);
            return;
        }
    }
    REQUIRE(false);
}

TEST_CASE("bcdl termination phase: last node wins and hears no reply") {
    // n = 1: the single node is counted the first time it beeps, and the
    // continue slot right after is silent, ending the run in that phase.
    const auto res = traced_run(Protocol::BcdL, 1, seed_with_pattern(1, {true}));
    CHECK(res.phases == 1);
    CHECK(res.slots == 3);
    CHECK(res.correct);
    CHECK(res.sizes == std::vector<std::uint32_t>{1});
    CHECK(res.phase_trace[0].terminated);

    const auto lazy = traced_run(Protocol::BcdL, 1, seed_with_pattern(1, {false}));
    CHECK(lazy.phases > 1);
    CHECK(lazy.correct);
}

TEST_CASE("bcdlcd lone contender is counted in the first slot") {
    const auto seed = seed_with_pattern(2, {true, false});
    const auto res = traced_run(Protocol::BcdLcd, 2, seed);
    const auto& ph = res.phase_trace[0];
    CHECK(ph.slot_beepers[0] == 1);
    CHECK(ph.slot_beepers[1] == 1);  // continue beep of the uncounted node
    CHECK(ph.newly_counted == 1);
    CHECK(ph.k_after == 2);
    CHECK(res.correct);
}

TEST_CASE("bcdlcd collision and silence adjust k like bcdl") {
    auto res = traced_run(Protocol::BcdLcd, 2, seed_with_pattern(2, {true, true}));
    CHECK(res.phase_trace[0].newly_counted == 0);
    CHECK(res.phase_trace[0].k_after == 3);
    res = traced_run(Protocol::BcdLcd, 2, seed_with_pattern(2, {false, false}));
    CHECK(res.phase_trace[0].k_after == 2);
}

TEST_CASE("bcdl and bcdlcd share coin draws, so phase counts match per seed") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto a = run_protocol(Protocol::BcdL, 1, kBcdL, seed);
        const auto b = run_protocol(Protocol::BcdLcd, 1, kBcdLcd, seed);
        CHECK(a.phases == b.phases);
    }
}

TEST_CASE("blcd lone contender wins through the reply slots") {
    const auto seed = seed_with_pattern(2, {true, false});
    const auto res = traced_run(Protocol::BLcd, 2, seed);
    const auto& ph = res.phase_trace[0];
    CHECK(ph.slot_beepers[0] == 1);  // contender
    CHECK(ph.slot_beepers[1] == 1);  // the listener's reply
    CHECK(ph.slot_beepers[2] == 0);  // no HeardMany report
    CHECK(ph.slot_beepers[3] == 1);  // loser continues
    CHECK(ph.newly_counted == 1);
    CHECK(ph.k_after == 2);
    CHECK(res.correct);
    CHECK(res.sizes == std::vector<std::uint32_t>{2, 2});
}

TEST_CASE("blcd two contenders get no reply and back off") {
    const auto seed = seed_with_pattern(2, {true, true});
    const auto res = traced_run(Protocol::BLcd, 2, seed);
    const auto& ph = res.phase_trace[0];
    CHECK(ph.slot_beepers[0] == 2);
    CHECK(ph.slot_beepers[1] == 0);  // every node beeped, nobody left to reply
    CHECK(ph.slot_beepers[2] == 0);
    CHECK(ph.newly_counted == 0);
    CHECK(ph.k_after == 3);  // silent reply slot reveals the collision
}

TEST_CASE("blcd listener reports a collision in the third slot") {
    const auto seed = seed_with_pattern(3, {true, true, false});
    const auto res = traced_run(Protocol::BLcd, 3, seed);
    const auto& ph = res.phase_trace[0];
    CHECK(ph.slot_beepers[0] == 2);
    CHECK(ph.slot_beepers[1] == 1);  // the bystander replies
    CHECK(ph.slot_beepers[2] == 1);  // and then reports HeardMany
    CHECK(ph.slot_beepers[3] == 3);
    CHECK(ph.newly_counted == 0);
    CHECK(ph.k_after == 3);
}

TEST_CASE("blcd silent first slot lowers k toward the floor") {
    const auto seed = seed_with_pattern(2, {false, false});
    const auto res = traced_run(Protocol::BLcd, 2, seed);
    const auto& ph = res.phase_trace[0];
    CHECK(ph.slot_beepers[0] == 0);
    CHECK(ph.slot_beepers[1] == 2);  // everyone replies to nothing
    CHECK(ph.newly_counted == 0);
    CHECK(ph.k_after == 2);
}

TEST_CASE("bl-mc lone contender sails through its window") {
    const auto seed = seed_with_pattern(2, {true, false});
    const auto res = traced_run(Protocol::BLMonteCarlo, 2, seed, 3);
    const auto& ph = res.phase_trace[0];
    CHECK(ph.slot_beepers[0] == 1);       // window participants
    CHECK(ph.window_beep_slots == 3);     // one occupied sub-slot per round
    CHECK(ph.slot_beepers[2] == 1);       // announcement
    CHECK(ph.newly_counted == 1);
    CHECK(ph.k_after == 2);
    CHECK(res.slots == res.phases * 8);
}

TEST_CASE("bl-mc failing run reports the joint winners' own view") {
    bool found_failure = false, found_success = false;
    for (std::uint64_t seed = 0; seed < 5000 && !(found_failure && found_success);
         ++seed) {
        const auto res = traced_run(Protocol::BLMonteCarlo, 2, seed, 1);
        CHECK_FALSE(res.aborted);
        if (res.correct) {
            CHECK(res.sizes == std::vector<std::uint32_t>{2, 2});
            found_success = true;
        } else {
            // the only failure mode at n=2: both contend with equal
            // signatures, win together, and never hear each other
            CHECK(res.sizes == std::vector<std::uint32_t>{1, 1});
            found_failure = true;
            bool joint = false;
            for (const auto& ph : res.phase_trace)
                if (ph.newly_counted == 2) joint = true;
            CHECK(joint);
        }
    }
    CHECK(found_failure);
    CHECK(found_success);
}

TEST_CASE("every protocol keeps uncounted nodes in lockstep on k") {
    struct Case { Protocol p; int rounds; };
    for (const Case c : {Case{Protocol::BcdL, 0}, Case{Protocol::BcdLcd, 0},
                         Case{Protocol::BLcd, 0}, Case{Protocol::BLMonteCarlo, 4}}) {
        for (std::uint64_t n : {2ULL, 5ULL, 17ULL}) {
            for (std::uint64_t seed = 0; seed < 200; ++seed) {
                RunConfig cfg;
                cfg.emulation_rounds = c.rounds;
                cfg.record_sizes = false;
                const auto res =
                    run_protocol(c.p, n, required_variant(c.p), seed, cfg);
                CHECK(res.k_disagreement_phases == 0);
                CHECK_FALSE(res.aborted);
                CHECK(res.slots ==
                      res.phases * slots_per_phase(c.p, c.rounds));
                if (is_las_vegas(c.p)) {
                    CHECK(res.correct);
                    CHECK(res.phases >= n);  // one node counted per phase at most
                }
            }
        }
    }
}

TEST_CASE("the three exact protocols agree on phase counts seed by seed") {
    for (std::uint64_t seed = 1000; seed < 1300; ++seed) {
        const auto a = run_protocol(Protocol::BcdL, 16, kBcdL, seed);
        const auto b = run_protocol(Protocol::BcdLcd, 16, kBcdLcd, seed);
        const auto c = run_protocol(Protocol::BLcd, 16, kBLcd, seed);
        CHECK(a.phases == b.phases);
        CHECK(a.phases == c.phases);
        CHECK(a.slots == a.phases * 3);
        CHECK(b.slots == b.phases * 2);
        CHECK(c.slots == c.phases * 4);
    }
}

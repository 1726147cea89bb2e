#include "beepsim/simulator.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "beepsim/emulation.hpp"
#include "beepsim/rng.hpp"

namespace beep {

RunResult run_protocol(Protocol protocol, std::uint64_t n, ModelVariant variant,
                       std::uint64_t seed, const RunConfig& config,
                       RunScratch& scratch) {
    if (n < 1) throw ConfigError("run_protocol: need at least one node");
    if (variant != required_variant(protocol))
        throw ConfigError(std::string("run_protocol: ") +
                          std::string(protocol_name(protocol)) + " runs in " +
                          std::string(variant_name(required_variant(protocol))) +
                          ", not " + std::string(variant_name(variant)));
    if (protocol == Protocol::BLcd && n == 1)
        throw ConfigError(
            "run_protocol: blcd cannot count a single node; its winner check "
            "waits for a reply that no other node exists to send");
    int rounds = 0;
    if (protocol == Protocol::BLMonteCarlo) {
        rounds = config.emulation_rounds;
        if (rounds < 1 || rounds > 64)
            throw ConfigError("run_protocol: bl-mc needs emulation rounds in [1, 64]");
    }

    const std::uint64_t phase_cap =
        config.phase_cap ? config.phase_cap : default_phase_cap(n);

    RunResult res;
    res.protocol = protocol;
    res.variant = variant;
    res.n = n;
    res.seed = seed;

    auto& states = scratch.states;
    auto& coins = scratch.coins;
    auto& term_phase = scratch.term_phase;
    states.assign(n, CountingState{});
    coins.resize(n);
    term_phase.assign(n, 0);
    for (std::uint64_t i = 0; i < n; ++i) {
        coins[i] = node_stream(seed, i, StreamPurpose::Coins);
        if (protocol == Protocol::BLMonteCarlo) {
            Stream sig = node_stream(seed, i, StreamPurpose::Signature);
            states[i].signature = draw_signature(sig, rounds);
        }
    }

    Workspace& ws = scratch.ws;
    ws.prepare(n);
    if (config.record_slots) ws.attach_slot_sink(&res.slot_trace);

    std::span<CountingState> state_span(states);
    std::span<Stream> coin_span(coins);

    std::uint64_t live = n;
    while (live > 0 && res.phases < phase_cap) {
        PhaseRecord rec;
        switch (protocol) {
            case Protocol::BcdL: rec = phase_bcdl(state_span, coin_span, ws); break;
            case Protocol::BcdLcd:
                rec = phase_bcdlcd(state_span, coin_span, ws);
                break;
            case Protocol::BLcd: rec = phase_blcd(state_span, coin_span, ws); break;
            case Protocol::BLMonteCarlo:
                rec = phase_bl_mc(state_span, coin_span, rounds, ws);
                break;
        }
        ++res.phases;
        rec.phase_index = res.phases;

        std::uint32_t shared_k = 0;
        bool uniform = true;
        for (const auto& st : states) {
            if (st.counted) continue;
            if (shared_k == 0)
                shared_k = st.k;
            else if (st.k != shared_k)
                uniform = false;
        }
        if (!uniform) ++res.k_disagreement_phases;

        if (rec.terminated) {
            for (std::uint64_t i = 0; i < n; ++i) {
                if (states[i].terminated && term_phase[i] == 0) {
                    term_phase[i] = res.phases;
                    --live;
                }
            }
        }
        if (config.record_phases) res.phase_trace.push_back(rec);
    }

    res.slots = ws.slots_resolved();
    res.aborted = live > 0;
    ws.attach_slot_sink(nullptr);

    res.size_min = std::numeric_limits<std::uint32_t>::max();
    res.size_max = 0;
    bool all_n = true;
    for (const auto& st : states) {
        res.size_min = std::min(res.size_min, st.size);
        res.size_max = std::max(res.size_max, st.size);
        all_n = all_n && st.size == n;
    }
    bool same_phase = term_phase[0] != 0;
    for (std::uint64_t i = 1; i < n; ++i)
        same_phase = same_phase && term_phase[i] == term_phase[0];
    res.correct = !res.aborted && all_n && same_phase;

    if (config.record_sizes) {
        res.sizes.resize(n);
        for (std::uint64_t i = 0; i < n; ++i) res.sizes[i] = states[i].size;
    }
    return res;
}

RunResult run_protocol(Protocol protocol, std::uint64_t n, ModelVariant variant,
                       std::uint64_t seed, const RunConfig& config) {
    RunScratch scratch;
    return run_protocol(protocol, n, variant, seed, config, scratch);
}

}  // namespace beep

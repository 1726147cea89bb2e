#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "beepsim/model.hpp"
#include "beepsim/rng.hpp"

namespace beep {

// The four counting protocols. Each one runs in exactly one model variant.
enum class Protocol : std::uint8_t {
    BcdL,          // 3 slots per phase
    BcdLcd,        // 2 slots per phase
    BLcd,          // 4 slots per phase, needs n >= 2
    BLMonteCarlo,  // 2r+2 slots per phase, result uncertain
};

std::string_view protocol_name(Protocol p);  // "bcdl", "bcdlcd", "blcd", "bl-mc"
std::optional<Protocol> parse_protocol(std::string_view name);
ModelVariant required_variant(Protocol p);
bool is_las_vegas(Protocol p);
std::uint64_t slots_per_phase(Protocol p, int emulation_rounds);

// Per-node protocol state.
struct CountingState {
    bool counted = false;     // never reverts once set
    bool terminated = false;  // the node takes no further actions once set
    std::uint32_t k = 2;      // contention parameter, beep probability 1/k
    std::uint32_t size = 1;   // network size estimate, counts self
    std::uint64_t signature = 0;  // r-bit word, BL emulation only
};

// What happened in one phase, from the scheduler's viewpoint.
struct PhaseRecord {
    std::uint64_t phase_index = 0;
    // Per-slot beeper counts in protocol slot order; unused slots stay 0.
    // For the BL emulation, slot 0 holds the number of window participants.
    std::array<std::uint32_t, 4> slot_beepers{};
    std::uint32_t window_beep_slots = 0;  // BL only: sub-slots with >= 1 beep
    std::uint32_t k_before = 0;           // shared k of uncounted nodes, 0 when none
    std::uint32_t k_after = 0;
    std::uint32_t newly_counted = 0;
    bool terminated = false;  // some node terminated at the end of this phase
};

// Advance every node by one phase. States and streams are index-aligned;
// protocol logic reads node indices only as array positions, never as
// identities. The workspace must be prepared for states.size() nodes.
PhaseRecord phase_bcdl(std::span<CountingState> states, std::span<Stream> coins,
                       Workspace& ws);
PhaseRecord phase_bcdlcd(std::span<CountingState> states, std::span<Stream> coins,
                         Workspace& ws);
PhaseRecord phase_blcd(std::span<CountingState> states, std::span<Stream> coins,
                       Workspace& ws);
PhaseRecord phase_bl_mc(std::span<CountingState> states, std::span<Stream> coins,
                        int rounds, Workspace& ws);

}  // namespace beep

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "beepsim/model.hpp"
#include "beepsim/rng.hpp"

namespace beep {

// How the number of detection rounds r is chosen.
//   PerNode(eps):             r = ceil(log2(1/eps));   usable without any size bound
//   Global(eps, N):           r = ceil(log2(N/eps));   N is a known upper bound on n
//   WithHighProbability(N):   r = ceil(2*log2(N))
struct RPolicy {
    enum class Kind : std::uint8_t { PerNode, Global, WithHighProbability };
    Kind kind = Kind::PerNode;
    double epsilon = 0.0;           // PerNode, Global; must lie in (0, 1)
    std::uint64_t upper_bound = 0;  // Global, WithHighProbability; must be >= 1

    static RPolicy per_node(double eps) { return {Kind::PerNode, eps, 0}; }
    static RPolicy global(double eps, std::uint64_t n_bound) {
        return {Kind::Global, eps, n_bound};
    }
    static RPolicy whp(std::uint64_t n_bound) {
        return {Kind::WithHighProbability, 0.0, n_bound};
    }
};

// Result is clamped to [1, 64]; 64 is the widest signature word supported.
// Throws std::invalid_argument on parameters outside the documented ranges.
int choose_r(const RPolicy& policy);

// The r-bit word a node keeps for the lifetime of a run. Bit i selects the
// sub-slot the node beeps in during detection round i.
std::uint64_t draw_signature(Stream& stream, int rounds);

// Runs the 2*rounds-slot detection window through the slot mechanism.
// participants[i] != 0 marks nodes executing the procedure; everyone else
// listens for the whole window. On return, collision[i] is set for each
// participant that heard a beep in a sub-slot it did not beep in, and
// heard[i] for each non-participant that heard any beep in the window.
// beep_slots, when given, receives the number of sub-slots with >= 1 beep.
void emulate_window(std::span<const std::uint8_t> participants,
                    std::span<const std::uint64_t> signatures, int rounds,
                    Workspace& ws, std::span<std::uint8_t> collision,
                    std::span<std::uint8_t> heard,
                    std::uint32_t* beep_slots = nullptr);

// Standalone window with the given participant signatures plus
// `listener_count` silent bystanders. Used by tests and enumeration.
struct WindowOutcome {
    std::vector<std::uint8_t> collision;  // one flag per participant
    bool any_beep = false;                // what the bystanders heard
};
WindowOutcome emulate_bcd(const std::vector<std::uint64_t>& participant_signatures,
                          int rounds, std::size_t listener_count = 0);

}  // namespace beep

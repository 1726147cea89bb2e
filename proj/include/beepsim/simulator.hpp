#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "beepsim/model.hpp"
#include "beepsim/protocols.hpp"

namespace beep {

// Rejected parameter combination (wrong variant for the protocol, blcd with
// a single node, bad emulation rounds). Distinct from plain usage errors so
// the CLI can map it to its own exit code.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::uint64_t phase_cap = 0;  // 0 means 10000 * n
    int emulation_rounds = 0;     // bl-mc only; must lie in [1, 64] there
    bool record_sizes = true;     // keep every node's final size
    bool record_phases = false;   // keep one PhaseRecord per phase
    bool record_slots = false;    // keep full SlotRecords (small runs only)
};

struct RunResult {
    Protocol protocol{};
    ModelVariant variant{};
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::uint64_t run_id = 0;  // position within a batch; 0 for lone runs
    std::uint64_t phases = 0;
    std::uint64_t slots = 0;
    std::uint32_t size_min = 0;  // extremes of the per-node size reports
    std::uint32_t size_max = 0;
    bool correct = false;  // every node reported n and all terminated together
    bool aborted = false;  // hit the phase cap before terminating
    // Phases after which uncounted nodes disagreed on k. Always 0; counted
    // instead of asserted so a violation surfaces as test data, not a crash.
    std::uint64_t k_disagreement_phases = 0;
    std::vector<std::uint32_t> sizes;      // per node, when recorded
    std::vector<PhaseRecord> phase_trace;  // when recorded
    std::vector<SlotRecord> slot_trace;    // when recorded
};

constexpr std::uint64_t default_phase_cap(std::uint64_t n) { return 10000 * n; }

// Reusable buffers so batch drivers do not reallocate per run.
struct RunScratch {
    Workspace ws;
    std::vector<CountingState> states;
    std::vector<Stream> coins;
    std::vector<std::uint64_t> term_phase;
};

// One full protocol execution. The result is a pure function of the
// arguments; scratch contents do not influence it.
RunResult run_protocol(Protocol protocol, std::uint64_t n, ModelVariant variant,
                       std::uint64_t seed, const RunConfig& config,
                       RunScratch& scratch);
RunResult run_protocol(Protocol protocol, std::uint64_t n, ModelVariant variant,
                       std::uint64_t seed, const RunConfig& config = {});

}  // namespace beep

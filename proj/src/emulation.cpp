#include "beepsim/emulation.hpp"

#include <cmath>
#include <stdexcept>

namespace beep {

namespace {

// Smallest r with 2^r >= value, computed with an explicit fix-up so a
// borderline log2 rounding cannot shift the result.
int ceil_log2(double value) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw std::invalid_argument("choose_r: bound must be positive and finite");
    int r = static_cast<int>(std::ceil(std::log2(value)));
    if (r < 0) r = 0;
    while (std::ldexp(1.0, r) < value) ++r;
    while (r > 0 && std::ldexp(1.0, r - 1) >= value) --r;
    return r;
}

}  // namespace

int choose_r(const RPolicy& policy) {
    int r = 0;
    switch (policy.kind) {
        case RPolicy::Kind::PerNode:
            if (!(policy.epsilon > 0.0) || !(policy.epsilon < 1.0))
                throw std::invalid_argument("choose_r: epsilon must lie in (0, 1)");
            r = ceil_log2(1.0 / policy.epsilon);
            break;
        case RPolicy::Kind::Global:
            if (!(policy.epsilon > 0.0) || !(policy.epsilon < 1.0))
                throw std::invalid_argument("choose_r: epsilon must lie in (0, 1)");
            if (policy.upper_bound < 1)
                throw std::invalid_argument("choose_r: upper bound must be >= 1");
            r = ceil_log2(static_cast<double>(policy.upper_bound) / policy.epsilon);
            break;
        case RPolicy::Kind::WithHighProbability: {
            if (policy.upper_bound < 1)
                throw std::invalid_argument("choose_r: upper bound must be >= 1");
            // smallest r with 2^r >= N^2, i.e. r = ceil(2*log2(N))
            const double n = static_cast<double>(policy.upper_bound);
            r = ceil_log2(n * n);
            break;
        }
    }
    if (r < 1) r = 1;
    if (r > 64)
        throw std::invalid_argument("choose_r: policy requires more than 64 rounds");
    return r;
}

std::uint64_t draw_signature(Stream& stream, int rounds) {
    if (rounds < 1 || rounds > 64)
        throw std::invalid_argument("draw_signature: rounds must lie in [1, 64]");
    std::uint64_t sig = 0;
    for (int i = 0; i < rounds; ++i) sig |= (stream.next() & 1ULL) << i;
    return sig;
}

void emulate_window(std::span<const std::uint8_t> participants,
                    std::span<const std::uint64_t> signatures, int rounds,
                    Workspace& ws, std::span<std::uint8_t> collision,
                    std::span<std::uint8_t> heard, std::uint32_t* beep_slots) {
    const std::size_t n = participants.size();
    if (signatures.size() != n || collision.size() != n || heard.size() != n)
        throw std::invalid_argument("emulate_window: size mismatch");
    if (rounds < 1 || rounds > 64)
        throw std::invalid_argument("emulate_window: rounds must lie in [1, 64]");

    std::uint32_t beeping_slots = 0;
    auto& actions = ws.actions();
    for (int round = 0; round < rounds; ++round) {
        for (int sub = 0; sub < 2; ++sub) {
            for (std::size_t i = 0; i < n; ++i) {
                const bool beeps = participants[i] &&
                                   static_cast<int>((signatures[i] >> round) & 1ULL) == sub;
                actions[i] = beeps ? SlotAction::Beep : SlotAction::Listen;
            }
            std::uint32_t beepers = 0;
            auto obs = ws.resolve(kBL, sub, &beepers);
            if (beepers > 0) ++beeping_slots;
            for (std::size_t i = 0; i < n; ++i) {
                if (participants[i]) {
                    // beeped in the other sub-slot; a beep heard here means
                    // someone used a different slot than it did
                    if (actions[i] == SlotAction::Listen && heard_neighbor(obs[i]))
                        collision[i] = 1;
                } else if (heard_neighbor(obs[i])) {
                    heard[i] = 1;
                }
            }
        }
    }
    if (beep_slots) *beep_slots = beeping_slots;
}

WindowOutcome emulate_bcd(const std::vector<std::uint64_t>& participant_signatures,
                          int rounds, std::size_t listener_count) {
    const std::size_t m = participant_signatures.size();
    const std::size_t n = m + listener_count;
    if (n == 0) throw std::invalid_argument("emulate_bcd: no nodes");

    std::vector<std::uint8_t> participants(n, 0);
    std::vector<std::uint64_t> signatures(n, 0);
    for (std::size_t i = 0; i < m; ++i) {
        participants[i] = 1;
        signatures[i] = participant_signatures[i];
    }

    Workspace ws;
    ws.prepare(n);
    std::vector<std::uint8_t> collision(n, 0), heard(n, 0);
    emulate_window(participants, signatures, rounds, ws, collision, heard);

    WindowOutcome out;
    out.collision.assign(collision.begin(), collision.begin() + static_cast<long>(m));
    for (std::size_t i = m; i < n; ++i) out.any_beep = out.any_beep || heard[i];
    if (listener_count == 0) out.any_beep = m > 0;
    return out;
}

}  // namespace beep

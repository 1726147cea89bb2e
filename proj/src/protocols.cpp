#include "beepsim/protocols.hpp"

#include <stdexcept>

#include "beepsim/emulation.hpp"

namespace beep {

std::string_view protocol_name(Protocol p) {
    switch (p) {
        case Protocol::BcdL: return "bcdl";
        case Protocol::BcdLcd: return "bcdlcd";
        case Protocol::BLcd: return "blcd";
        case Protocol::BLMonteCarlo: return "bl-mc";
    }
    return "?";
}

std::optional<Protocol> parse_protocol(std::string_view name) {
    if (name == "bcdl") return Protocol::BcdL;
    if (name == "bcdlcd") return Protocol::BcdLcd;
    if (name == "blcd") return Protocol::BLcd;
    if (name == "bl-mc") return Protocol::BLMonteCarlo;
    return std::nullopt;
}

ModelVariant required_variant(Protocol p) {
    switch (p) {
        case Protocol::BcdL: return kBcdL;
        case Protocol::BcdLcd: return kBcdLcd;
        case Protocol::BLcd: return kBLcd;
        case Protocol::BLMonteCarlo: return kBL;
    }
    return kBL;
}

bool is_las_vegas(Protocol p) { return p != Protocol::BLMonteCarlo; }

std::uint64_t slots_per_phase(Protocol p, int emulation_rounds) {
    switch (p) {
        case Protocol::BcdL: return 3;
        case Protocol::BcdLcd: return 2;
        case Protocol::BLcd: return 4;
        case Protocol::BLMonteCarlo:
            return 2 * static_cast<std::uint64_t>(emulation_rounds) + 2;
    }
    return 0;
}

namespace {

// Shared k of the uncounted nodes, 0 when all are counted. The protocols
// keep this value equal across uncounted nodes; the scheduler asserts it.
std::uint32_t uncounted_k(std::span<const CountingState> states) {
    for (const auto& st : states)
        if (!st.counted) return st.k;
    return 0;
}

void decrement_k(CountingState& st) {
    if (st.k > 2) --st.k;
}

}  // namespace

PhaseRecord phase_bcdl(std::span<CountingState> states, std::span<Stream> coins,
                       Workspace& ws) {
    PhaseRecord rec;
    rec.k_before = uncounted_k(states);
    const std::size_t n = states.size();
    auto& actions = ws.actions();

    // slot 1: uncounted nodes contend with probability 1/k
    for (std::size_t i = 0; i < n; ++i) {
        const bool contend =
            !states[i].counted && coins[i].bernoulli(1.0 / states[i].k);
        actions[i] = contend ? SlotAction::Beep : SlotAction::Listen;
    }
    auto obs1 = ws.resolve(kBcdL, 0, &rec.slot_beepers[0]);

    // slot 2: a node that beeped alone announces its win
    for (std::size_t i = 0; i < n; ++i)
        actions[i] = obs1[i] == Observation::SpeakerAlone ? SlotAction::Beep
                                                          : SlotAction::Listen;
    auto obs2 = ws.resolve(kBcdL, 1, &rec.slot_beepers[1]);
    for (std::size_t i = 0; i < n; ++i) {
        if (obs1[i] == Observation::SpeakerAlone) {
            states[i].counted = true;
            ++rec.newly_counted;
        }
    }

    // slot 3: uncounted nodes signal that the protocol must continue
    for (std::size_t i = 0; i < n; ++i)
        actions[i] = states[i].counted ? SlotAction::Listen : SlotAction::Beep;
    auto obs3 = ws.resolve(kBcdL, 2, &rec.slot_beepers[2]);

    // end of phase
    for (std::size_t i = 0; i < n; ++i) {
        CountingState& st = states[i];
        if (heard_neighbor(obs2[i])) ++st.size;
        if (obs3[i] == Observation::Silence) {
            st.terminated = true;
            rec.terminated = true;
        }
        if (!st.counted) {
            if (obs1[i] == Observation::Silence) {
                decrement_k(st);
            } else {
                // Beepers detect the collision directly; listeners infer it
                // from a slot-1 beep that no slot-2 announcement followed.
                const bool collided =
                    obs1[i] == Observation::SpeakerCollision ||
                    (heard_neighbor(obs1[i]) && obs2[i] == Observation::Silence);
                if (collided) ++st.k;
            }
        }
    }
    rec.k_after = uncounted_k(states);
    return rec;
}

PhaseRecord phase_bcdlcd(std::span<CountingState> states, std::span<Stream> coins,
                         Workspace& ws) {
    PhaseRecord rec;
    rec.k_before = uncounted_k(states);
    const std::size_t n = states.size();
    auto& actions = ws.actions();

    // slot 1: contention; listener-side detection replaces the announcement
    for (std::size_t i = 0; i < n; ++i) {
        const bool contend =
            !states[i].counted && coins[i].bernoulli(1.0 / states[i].k);
        actions[i] = contend ? SlotAction::Beep : SlotAction::Listen;
    }
    auto obs1 = ws.resolve(kBcdLcd, 0, &rec.slot_beepers[0]);
    for (std::size_t i = 0; i < n; ++i) {
        if (obs1[i] == Observation::SpeakerAlone) {
            states[i].counted = true;
            ++rec.newly_counted;
        }
        if (obs1[i] == Observation::HeardOne) ++states[i].size;
    }

    // slot 2: uncounted nodes signal continuation
    for (std::size_t i = 0; i < n; ++i)
        actions[i] = states[i].counted ? SlotAction::Listen : SlotAction::Beep;
    auto obs2 = ws.resolve(kBcdLcd, 1, &rec.slot_beepers[1]);

    for (std::size_t i = 0; i < n; ++i) {
        CountingState& st = states[i];
        if (obs2[i] == Observation::Silence) {
            st.terminated = true;
            rec.terminated = true;
        }
        if (!st.counted) {
            if (obs1[i] == Observation::Silence) {
                decrement_k(st);
            } else if (obs1[i] == Observation::SpeakerCollision ||
                       obs1[i] == Observation::HeardMany) {
                ++st.k;
            }
        }
    }
    rec.k_after = uncounted_k(states);
    return rec;
}

PhaseRecord phase_blcd(std::span<CountingState> states, std::span<Stream> coins,
                       Workspace& ws) {
    PhaseRecord rec;
    rec.k_before = uncounted_k(states);
    const std::size_t n = states.size();
    auto& actions = ws.actions();
    auto& beeped1 = ws.mark;

    // slot 1: contention
    for (std::size_t i = 0; i < n; ++i) {
        const bool contend =
            !states[i].counted && coins[i].bernoulli(1.0 / states[i].k);
        beeped1[i] = contend;
        actions[i] = contend ? SlotAction::Beep : SlotAction::Listen;
    }
    auto obs1 = ws.resolve(kBLcd, 0, &rec.slot_beepers[0]);

    // slot 2: everyone that listened in slot 1 beeps, so a slot-1 beeper can
    // tell the all-beeped case (silence here) from a normal one
    for (std::size_t i = 0; i < n; ++i)
        actions[i] = beeped1[i] ? SlotAction::Listen : SlotAction::Beep;
    auto obs2 = ws.resolve(kBLcd, 1, &rec.slot_beepers[1]);

    // slot 3: slot-1 listeners that heard a collision report it back
    for (std::size_t i = 0; i < n; ++i)
        actions[i] = !beeped1[i] && obs1[i] == Observation::HeardMany
                         ? SlotAction::Beep
                         : SlotAction::Listen;
    auto obs3 = ws.resolve(kBLcd, 2, &rec.slot_beepers[2]);

    for (std::size_t i = 0; i < n; ++i) {
        if (beeped1[i] && heard_neighbor(obs2[i]) &&
            obs3[i] == Observation::Silence) {
            states[i].counted = true;
            ++rec.newly_counted;
        }
        if (!beeped1[i] && obs1[i] == Observation::HeardOne) ++states[i].size;
    }

    // slot 4: uncounted nodes signal continuation
    for (std::size_t i = 0; i < n; ++i)
        actions[i] = states[i].counted ? SlotAction::Listen : SlotAction::Beep;
    auto obs4 = ws.resolve(kBLcd, 3, &rec.slot_beepers[3]);

    for (std::size_t i = 0; i < n; ++i) {
        CountingState& st = states[i];
        if (obs4[i] == Observation::Silence) {
            st.terminated = true;
            rec.terminated = true;
        }
        if (!st.counted) {
            if (!beeped1[i] && obs1[i] == Observation::Silence) {
                decrement_k(st);
            } else {
                const bool collided =
                    (!beeped1[i] && obs1[i] == Observation::HeardMany) ||
                    (beeped1[i] && (heard_neighbor(obs3[i]) ||
                                    obs2[i] == Observation::Silence));
                if (collided) ++st.k;
            }
        }
    }
    rec.k_after = uncounted_k(states);
    return rec;
}

PhaseRecord phase_bl_mc(std::span<CountingState> states, std::span<Stream> coins,
                        int rounds, Workspace& ws) {
    PhaseRecord rec;
    rec.k_before = uncounted_k(states);
    const std::size_t n = states.size();
    auto& actions = ws.actions();
    auto& contend = ws.mark;
    auto& collision = ws.collision;
    auto& heard = ws.heard;

    // the 1/k coin is drawn before the window; non-contenders sit it out
    for (std::size_t i = 0; i < n; ++i) {
        contend[i] = !states[i].counted && coins[i].bernoulli(1.0 / states[i].k);
        collision[i] = 0;
        heard[i] = 0;
        ws.sigs[i] = states[i].signature;
        if (contend[i]) ++rec.slot_beepers[0];
    }

    // detection window standing in for a collision-detecting beep
    emulate_window(contend, ws.sigs, rounds, ws,
                   std::span<std::uint8_t>(collision),
                   std::span<std::uint8_t>(heard), &rec.window_beep_slots);

    // announcement slot: contenders that saw no collision treat themselves
    // as having beeped alone
    for (std::size_t i = 0; i < n; ++i) {
        const bool wins = contend[i] && !collision[i];
        actions[i] = wins ? SlotAction::Beep : SlotAction::Listen;
        if (wins) {
            states[i].counted = true;
            ++rec.newly_counted;
        }
    }
    auto obs2 = ws.resolve(kBL, 2, &rec.slot_beepers[1]);

    // continuation slot
    for (std::size_t i = 0; i < n; ++i)
        actions[i] = states[i].counted ? SlotAction::Listen : SlotAction::Beep;
    auto obs3 = ws.resolve(kBL, 3, &rec.slot_beepers[2]);

    for (std::size_t i = 0; i < n; ++i) {
        CountingState& st = states[i];
        if (heard_neighbor(obs2[i])) ++st.size;
        if (obs3[i] == Observation::Silence) {
            st.terminated = true;
            rec.terminated = true;
        }
        if (!st.counted) {
            if (contend[i]) {
                if (collision[i]) ++st.k;
            } else if (!heard[i]) {
                decrement_k(st);
            } else if (obs2[i] == Observation::Silence) {
                // beeps in the window with no winner announced: collision
                ++st.k;
            }
        }
    }
    rec.k_after = uncounted_k(states);
    return rec;
}

}  // namespace beep

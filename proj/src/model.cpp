#include "beepsim/model.hpp"

#include <stdexcept>

namespace beep {

std::string_view variant_name(ModelVariant v) {
    if (v.speaker_cd) return v.listener_cd ? "BcdLcd" : "BcdL";
    return v.listener_cd ? "BLcd" : "BL";
}

std::string_view observation_name(Observation o) {
    switch (o) {
        case Observation::SpeakerAlone: return "SpeakerAlone";
        case Observation::SpeakerCollision: return "SpeakerCollision";
        case Observation::SpeakerUnknown: return "SpeakerUnknown";
        case Observation::Silence: return "Silence";
        case Observation::HeardBeep: return "HeardBeep";
        case Observation::HeardOne: return "HeardOne";
        case Observation::HeardMany: return "HeardMany";
    }
    return "?";
}

std::size_t count_beepers(std::span<const SlotAction> actions) noexcept {
    std::size_t beepers = 0;
    for (SlotAction a : actions) beepers += (a == SlotAction::Beep);
    return beepers;
}

void resolve_slot(std::span<const SlotAction> actions, ModelVariant variant,
                  std::span<Observation> out) {
    if (actions.empty()) throw std::invalid_argument("resolve_slot: no nodes");
    if (out.size() != actions.size())
        throw std::invalid_argument("resolve_slot: output size mismatch");

    const std::size_t beepers = count_beepers(actions);
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (actions[i] == SlotAction::Beep) {
            if (variant.speaker_cd)
                out[i] = beepers == 1 ? Observation::SpeakerAlone
                                      : Observation::SpeakerCollision;
            else
                out[i] = Observation::SpeakerUnknown;
        } else {
            if (beepers == 0)
                out[i] = Observation::Silence;
            else if (variant.listener_cd)
                out[i] = beepers == 1 ? Observation::HeardOne : Observation::HeardMany;
            else
                out[i] = Observation::HeardBeep;
        }
    }
}

std::vector<Observation> resolve_slot(const std::vector<SlotAction>& actions,
                                      ModelVariant variant) {
    std::vector<Observation> out(actions.size());
    resolve_slot(std::span<const SlotAction>(actions), variant,
                 std::span<Observation>(out));
    return out;
}

void Workspace::prepare(std::size_t n) {
    actions_.assign(n, SlotAction::Listen);
    for (auto& o : obs_) o.assign(n, Observation::Silence);
    mark.assign(n, 0);
    collision.assign(n, 0);
    heard.assign(n, 0);
    sigs.assign(n, 0);
    slot_index_ = 0;
}

std::span<const Observation> Workspace::resolve(ModelVariant variant, int buf,
                                                std::uint32_t* beepers) {
    auto& obs = obs_[static_cast<std::size_t>(buf)];
    resolve_slot(std::span<const SlotAction>(actions_), variant,
                 std::span<Observation>(obs));
    if (beepers)
        *beepers = static_cast<std::uint32_t>(
            count_beepers(std::span<const SlotAction>(actions_)));
    if (slot_sink_) {
        SlotRecord rec;
        rec.slot_index = slot_index_;
        rec.beeper_count = static_cast<std::uint32_t>(
            count_beepers(std::span<const SlotAction>(actions_)));
        rec.actions = actions_;
        rec.observations = obs;
        slot_sink_->push_back(std::move(rec));
    }
    ++slot_index_;
    return obs;
}

}  // namespace beep

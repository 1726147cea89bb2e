#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace beep {

// Which collision-detection capabilities the channel grants. Exactly four
// combinations exist: BL, BcdL, BLcd, BcdLcd.
struct ModelVariant {
    bool speaker_cd = false;   // a beeping node learns whether it beeped alone
    bool listener_cd = false;  // a listening node tells one beep from several

    friend constexpr bool operator==(ModelVariant, ModelVariant) = default;
};

inline constexpr ModelVariant kBL{false, false};
inline constexpr ModelVariant kBcdL{true, false};
inline constexpr ModelVariant kBLcd{false, true};
inline constexpr ModelVariant kBcdLcd{true, true};

std::string_view variant_name(ModelVariant v);

// Every live node takes exactly one action per slot.
enum class SlotAction : std::uint8_t { Listen = 0, Beep = 1 };

enum class Observation : std::uint8_t {
    // speaker side
    SpeakerAlone,      // beeped, nobody else did (speaker_cd only)
    SpeakerCollision,  // beeped concurrently with someone (speaker_cd only)
    SpeakerUnknown,    // beeped, no collision detection
    // listener side
    Silence,           // nobody beeped
    HeardBeep,         // at least one beep, no listener cd
    HeardOne,          // exactly one beep (listener_cd only)
    HeardMany,         // two or more beeps (listener_cd only)
};

std::string_view observation_name(Observation o);

// True when the observation is direct evidence that some *other* node beeped.
constexpr bool heard_neighbor(Observation o) noexcept {
    return o == Observation::SpeakerCollision || o == Observation::HeardBeep ||
           o == Observation::HeardOne || o == Observation::HeardMany;
}

std::size_t count_beepers(std::span<const SlotAction> actions) noexcept;

// Resolves what every node perceives after one slot on a complete graph.
// Throws std::invalid_argument when `actions` is empty or sizes mismatch.
void resolve_slot(std::span<const SlotAction> actions, ModelVariant variant,
                  std::span<Observation> out);
std::vector<Observation> resolve_slot(const std::vector<SlotAction>& actions,
                                      ModelVariant variant);

// Full acoustic record of one slot, for trace inspection and soundness checks.
struct SlotRecord {
    std::uint64_t slot_index = 0;
    std::uint32_t beeper_count = 0;
    std::vector<SlotAction> actions;
    std::vector<Observation> observations;
};

// Reusable per-run buffers for slot resolution. Phase functions fill
// `actions`, call resolve() into one of the observation buffers, and read
// the result back; nothing is reallocated between slots.
class Workspace {
  public:
    void prepare(std::size_t n);

    std::vector<SlotAction>& actions() noexcept { return actions_; }

    // Resolves actions() into buffer `buf`, returns the observations and the
    // beeper count; appends a SlotRecord when a sink is attached.
    std::span<const Observation> resolve(ModelVariant variant, int buf,
                                         std::uint32_t* beepers = nullptr);

    void attach_slot_sink(std::vector<SlotRecord>* sink) noexcept { slot_sink_ = sink; }
    std::uint64_t slots_resolved() const noexcept { return slot_index_; }

    // scratch flag arrays for the protocols
    std::vector<std::uint8_t> mark;       // slot-1 beeper / window participant
    std::vector<std::uint8_t> collision;  // sticky window collision flag
    std::vector<std::uint8_t> heard;      // heard-any-beep-in-window flag
    std::vector<std::uint64_t> sigs;      // signature staging for the window

  private:
    std::vector<SlotAction> actions_;
    std::array<std::vector<Observation>, 4> obs_;
    std::vector<SlotRecord>* slot_sink_ = nullptr;
    std::uint64_t slot_index_ = 0;
};

}  // namespace beep

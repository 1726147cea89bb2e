#pragma once

#include <cstdint>

namespace beep {

// splitmix64 finalizer. Used as the output function of counter-based
// streams and to derive stream keys from seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Order-sensitive combination of a running hash with one more value.
constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept {
    return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

// Counter-based random stream: draw i is a pure function of (key, i), so a
// node's decisions are reproducible regardless of when other nodes draw.
class Stream {
  public:
    Stream() = default;
    explicit Stream(std::uint64_t key) noexcept : key_(key) {}

    std::uint64_t next() noexcept {
        return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
    }

    // Uniform in [0, 1), 53 bits.
    double next_unit() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) noexcept { return next_unit() < p; }

    std::uint64_t key() const noexcept { return key_; }

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

// Seed for run `run_id` of a batch cell with `n` nodes.
constexpr std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t n,
                                        std::uint64_t run_id) noexcept {
    return hash_combine(hash_combine(master_seed, n), run_id);
}

// Independent per-node substreams. Coins drive the protocol's probability
// draws; signatures are consumed only once at startup, so generating them
// never shifts the coin sequence.
enum class StreamPurpose : std::uint64_t { Coins = 0, Signature = 1 };

inline Stream node_stream(std::uint64_t run_seed, std::uint64_t node_index,
                          StreamPurpose purpose) noexcept {
    return Stream(hash_combine(hash_combine(run_seed, node_index),
                               static_cast<std::uint64_t>(purpose)));
}

}  // namespace beep

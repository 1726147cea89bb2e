#pragma once

#include <cstdint>

namespace beep {

// Outcome distribution of one contention slot when n_prime uncounted nodes
// each beep independently with probability 1/k.
struct PhaseProbabilities {
    double p_none = 0.0;       // nobody beeps
    double p_single = 0.0;     // exactly one beeps
    double p_collision = 0.0;  // two or more beep
};

// p_none = (1 - 1/k)^n', p_single = (n'/k)(1 - 1/k)^(n'-1), collision the
// rest. p_single is computed in this multiplicative form on purpose; deriving
// it by subtraction would cancel badly for small k.
// Throws std::invalid_argument when k < 2.
PhaseProbabilities phase_probs(std::uint32_t k, std::uint64_t n_prime);

// For k <= n' the bad move is a silent slot (k would shrink while crowded);
// for k >= 3n' it is any beep at all (k could grow while already sparse).
// Returns true iff that probability is <= 0.4. Outside those two regimes the
// question is not posed; throws std::invalid_argument.
bool bad_phase_bound_check(std::uint32_t k, std::uint64_t n_prime);

// Tail bound 2*exp(-n/66) on seeing 23n bad phases among 55n.
// Throws std::invalid_argument when n < 1.
double chernoff_tail(std::uint64_t n);

struct ExpectedPhasesResult {
    double value = 0.0;      // expected phases from the start state (n, k=2)
    double residual = 0.0;   // worst normalized equation residual of the solve
    double truncation_gap = 0.0;  // |value - value at half the k cap|
    std::uint32_t k_cap = 0;      // cap actually used
};

// Exact expected phase count of the counting dynamics, by direct solution of
// the absorption-time equations of the chain on (uncounted count, k). The k
// axis is truncated at k_cap with a reflecting top; the gap to a half-cap
// solve is reported so truncation error is visible, not assumed.
//   k_cap 0 picks 64*n; otherwise k_cap >= 3n is required.
// Throws std::invalid_argument on bad parameters and std::runtime_error when
// the solve's residual exceeds the tolerance.
ExpectedPhasesResult expected_phases_exact(std::uint64_t n, std::uint32_t k_cap = 0,
                                           double tolerance = 1e-10);

}  // namespace beep

#include "beepsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>
#include <vector>

namespace beep {

PhaseProbabilities phase_probs(std::uint32_t k, std::uint64_t n_prime) {
    if (k < 2) throw std::invalid_argument("phase_probs: k must be >= 2");
    PhaseProbabilities p;
    if (n_prime == 0) {
        p.p_none = 1.0;
        return p;
    }
    const double q = 1.0 - 1.0 / static_cast<double>(k);
    const double np = static_cast<double>(n_prime);
    p.p_none = std::pow(q, np);
    p.p_single = (np / static_cast<double>(k)) * std::pow(q, np - 1.0);
    p.p_collision = 1.0 - p.p_none - p.p_single;
    p.p_collision = std::clamp(p.p_collision, 0.0, 1.0);
    return p;
}

bool bad_phase_bound_check(std::uint32_t k, std::uint64_t n_prime) {
    if (k < 2) throw std::invalid_argument("bad_phase_bound_check: k must be >= 2");
    if (n_prime < 1)
        throw std::invalid_argument("bad_phase_bound_check: n_prime must be >= 1");
    const auto p = phase_probs(k, n_prime);
    if (k <= n_prime) return p.p_none <= 0.4;
    if (k >= 3 * n_prime) return 1.0 - p.p_none <= 0.4;
    throw std::invalid_argument(
        "bad_phase_bound_check: needs k <= n_prime or k >= 3*n_prime");
}

double chernoff_tail(std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("chernoff_tail: n must be >= 1");
    return 2.0 * std::exp(-static_cast<double>(n) / 66.0);
}

namespace {

// Expected absorption time from every k of one uncounted-count layer, given
// the solved previous layer. The equations couple only neighboring k values,
// so one forward elimination / back substitution pass solves the layer. Each
// row is strictly diagonally dominant (p_single > 0), no pivoting needed.
// Returns the worst normalized residual seen.
double solve_layer(std::uint64_t n_prime, std::uint32_t k_cap,
                   const std::vector<double>& prev, std::vector<double>& out,
                   std::vector<double>& cprime, std::vector<double>& dprime) {
    const std::size_t m = k_cap - 1;  // unknowns for k = 2 .. k_cap
    cprime.assign(m, 0.0);
    dprime.assign(m, 0.0);

    auto row = [&](std::size_t i, double& a, double& b, double& c, double& d) {
        const std::uint32_t k = static_cast<std::uint32_t>(i) + 2;
        const auto p = phase_probs(k, n_prime);
        a = -p.p_none;
        b = 1.0;
        c = -p.p_collision;
        if (k == 2) {
            // k cannot drop below 2; the stay-put term folds into b
            a = 0.0;
            b = 1.0 - p.p_none;
        }
        if (k == k_cap) {
            // reflecting top: collision keeps k at the cap
            c = 0.0;
            b = (k == 2) ? 1.0 - p.p_none - p.p_collision : 1.0 - p.p_collision;
        }
        d = 1.0 + p.p_single * prev[i];
    };

    for (std::size_t i = 0; i < m; ++i) {
        double a, b, c, d;
        row(i, a, b, c, d);
        const double denom = i == 0 ? b : b - a * cprime[i - 1];
        cprime[i] = c / denom;
        dprime[i] = (i == 0 ? d : d - a * dprime[i - 1]) / denom;
    }
    out[m - 1] = dprime[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) out[i] = dprime[i] - cprime[i] * out[i + 1];

    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(out[i]));
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double a, b, c, d;
        row(i, a, b, c, d);
        double r = b * out[i] - d;
        if (i > 0) r += a * out[i - 1];
        if (i + 1 < m) r += c * out[i + 1];
        worst = std::max(worst, std::abs(r) / scale);
    }
    return worst;
}

// Expected phases from (n, k=2) under a fixed cap, plus the worst residual.
std::pair<double, double> solve_chain(std::uint64_t n, std::uint32_t k_cap) {
    const std::size_t m = k_cap - 1;
    std::vector<double> prev(m, 0.0), cur(m, 0.0), cprime, dprime;
    double worst = 0.0;
    for (std::uint64_t n_prime = 1; n_prime <= n; ++n_prime) {
        worst = std::max(worst, solve_layer(n_prime, k_cap, prev, cur, cprime, dprime));
        prev.swap(cur);
    }
    return {prev[0], worst};  // start state has k = 2
}

}  // namespace

ExpectedPhasesResult expected_phases_exact(std::uint64_t n, std::uint32_t k_cap,
                                           double tolerance) {
    if (n < 1) throw std::invalid_argument("expected_phases_exact: n must be >= 1");
    if (!(tolerance > 0.0))
        throw std::invalid_argument("expected_phases_exact: tolerance must be > 0");
    if (k_cap == 0)
        k_cap = static_cast<std::uint32_t>(std::min<std::uint64_t>(64 * n, 1u << 24));
    if (static_cast<std::uint64_t>(k_cap) < 3 * n)
        throw std::invalid_argument("expected_phases_exact: k_cap must be >= 3n");

    ExpectedPhasesResult res;
    res.k_cap = k_cap;
    auto [value, residual] = solve_chain(n, k_cap);
    res.value = value;
    res.residual = residual;
    if (residual > tolerance) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "expected_phases_exact: residual %.3e exceeds tolerance %.3e "
                      "(n=%llu, k_cap=%u)",
                      residual, tolerance, static_cast<unsigned long long>(n), k_cap);
        throw std::runtime_error(buf);
    }

    // Rerun with a coarser cap; the difference bounds what truncation costs.
    const std::uint32_t half =
        std::max<std::uint32_t>(static_cast<std::uint32_t>(3 * n), k_cap / 2);
    if (half < k_cap) res.truncation_gap = std::abs(res.value - solve_chain(n, half).first);
    return res;
}

}  // namespace beep

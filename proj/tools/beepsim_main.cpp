#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beepsim/harness.hpp"
#include "beepsim/oracle.hpp"
#include "beepsim/simulator.hpp"

namespace {

std::uint64_t parse_seed(const std::string& text) {
    if (text == "random") {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    try {
        std::size_t used = 0;
        const std::uint64_t value = std::stoull(text, &used);
        if (used == text.size()) return value;
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError("--seed must be an unsigned integer or 'random'");
}

std::string join_n(const std::vector<std::uint64_t>& ns) {
    std::string out;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(ns[i]);
    }
    return out;
}

// 12 significant digits, with a trailing ".0" when the value is integral so
// exact results read as reals.
std::string format_real(double v) {
    char buf[48];
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.1f", v);
    } else {
        std::snprintf(buf, sizeof buf, "%.12g", v);
    }
    return buf;
}

void dump_trace(const beep::BatchConfig& cfg) {
    beep::RunConfig rc;
    rc.phase_cap = cfg.phase_cap;
    rc.emulation_rounds = beep::effective_rounds(cfg);
    rc.record_phases = true;
    for (std::uint64_t n : cfg.n_values) {
        const std::uint64_t seed = beep::derive_run_seed(cfg.master_seed, n, 0);
        const auto r = beep::run_protocol(cfg.protocol, n, cfg.variant, seed, rc);
        for (const auto& ph : r.phase_trace) {
            std::printf("trace n=%" PRIu64 " run=0 phase=%" PRIu64
                        " beepers=%u,%u,%u,%u k=%u->%u counted+=%u",
                        n, ph.phase_index, ph.slot_beepers[0], ph.slot_beepers[1],
                        ph.slot_beepers[2], ph.slot_beepers[3], ph.k_before,
                        ph.k_after, ph.newly_counted);
            if (cfg.protocol == beep::Protocol::BLMonteCarlo)
                std::printf(" window_beep_slots=%u", ph.window_beep_slots);
            std::printf(" terminated=%d\n", ph.terminated ? 1 : 0);
        }
    }
}

int cmd_simulate(const beep::BatchConfig& cfg, const std::string& out,
                 const std::string& summary_out, bool trace) {
    const auto results = beep::run_batch(cfg);
    const auto summary = beep::summarize(results);
    if (!out.empty()) beep::write_results_csv(results, out);
    if (!summary_out.empty()) beep::write_summary_csv(summary, summary_out);
    if (trace) dump_trace(cfg);

    std::uint64_t incorrect = 0, aborted = 0, total = 0;
    double mean_weighted = 0.0;
    for (const auto& row : summary.rows) {
        incorrect += row.incorrect;
        aborted += row.aborted;
        total += row.runs;
        mean_weighted += row.mean_phases * static_cast<double>(row.runs);
    }
    mean_weighted /= static_cast<double>(total);

    std::printf("simulate %s %s n=%s runs=%" PRIu64 " seed=%" PRIu64,
                std::string(beep::protocol_name(cfg.protocol)).c_str(),
                std::string(beep::variant_name(cfg.variant)).c_str(),
                join_n(cfg.n_values).c_str(), cfg.runs, cfg.master_seed);
    if (cfg.protocol == beep::Protocol::BLMonteCarlo)
        std::printf(" r=%d", beep::effective_rounds(cfg));
    std::printf(" mean_phases=%.6g incorrect=%" PRIu64, mean_weighted, incorrect);
    if (cfg.protocol == beep::Protocol::BLMonteCarlo)
        std::printf(" failure_rate=%.6g",
                    static_cast<double>(incorrect) / static_cast<double>(total));
    std::printf(" aborted=%" PRIu64, aborted);
    if (summary.regression)
        std::printf(" slope=%.6g", summary.regression->slope);
    std::printf("\n");

    if (beep::is_las_vegas(cfg.protocol) && (incorrect > 0 || aborted > 0)) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic simulator for one-hop beeping-network counting "
                 "protocols, with exact analytics and batch experiments"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run a batch of protocol executions");
    std::string protocol_str, seed_str = "1", out_path, summary_path;
    std::vector<std::uint64_t> n_values;
    std::uint64_t runs = 1, phase_cap = 0;
    double epsilon = 0.0;
    std::uint64_t upper_bound = 0;
    int rflag = 0, jobs = 1;
    bool trace = false;
    sim->add_option("--protocol", protocol_str, "One of bcdl, bcdlcd, blcd, bl-mc")
        ->required()
        ->check(CLI::IsMember({"bcdl", "bcdlcd", "blcd", "bl-mc"}));
    sim->add_option("--n", n_values, "Node counts (repeatable)")->required();
    sim->add_option("--runs", runs, "Runs per n")->capture_default_str();
    sim->add_option("--seed", seed_str, "Master seed, or 'random' for entropy")
        ->capture_default_str();
    sim->add_option("--epsilon", epsilon,
                    "bl-mc failure budget; alone it bounds each node's risk, with "
                    "--upper-bound it bounds the whole run's");
    sim->add_option("--upper-bound", upper_bound,
                    "Known bound on n for the --epsilon conversion");
    sim->add_option("--r", rflag, "bl-mc detection rounds, overrides --epsilon");
    sim->add_option("--phase-cap", phase_cap,
                    "Abort a run after this many phases (0 means 10000*n)");
    sim->add_option("--jobs", jobs, "Worker threads; output is identical for any value")
        ->capture_default_str();
    sim->add_flag("--trace", trace, "Dump per-phase records of run 0 for every n");
    sim->add_option("--out", out_path, "Write per-run results CSV here");
    sim->add_option("--summary-out", summary_path, "Write per-n summary CSV here");

    // oracle
    auto* orc = app.add_subcommand("oracle", "Exact analytics queries");
    orc->require_subcommand(1);
    std::uint64_t o_k = 2, o_nprime = 0, o_n = 1, o_ub = 0;
    std::uint32_t o_kcap = 0;
    double o_tol = 1e-10, o_eps = 0.0;
    std::string o_policy;
    auto* probs = orc->add_subcommand(
        "phase-probs", "Outcome probabilities of one contention slot");
    probs->add_option("--k", o_k, "Contention parameter, >= 2")->required();
    probs->add_option("--n-prime", o_nprime, "Uncounted node count")->required();
    auto* expect = orc->add_subcommand(
        "expected-phases", "Exact expected phase count of a full run");
    expect->add_option("--n", o_n, "Node count")->required();
    expect->add_option("--k-cap", o_kcap, "k truncation cap (0 means 64*n)");
    expect->add_option("--tolerance", o_tol, "Residual tolerance")
        ->capture_default_str();
    auto* chern = orc->add_subcommand("chernoff", "Bad-phase tail bound 2*exp(-n/66)");
    chern->add_option("--n", o_n, "Node count")->required();
    auto* chooser = orc->add_subcommand("choose-r", "Detection rounds for a policy");
    chooser->add_option("--policy", o_policy, "per-node, global, or whp")
        ->required()
        ->check(CLI::IsMember({"per-node", "global", "whp"}));
    chooser->add_option("--epsilon", o_eps, "Failure budget in (0, 1)");
    chooser->add_option("--upper-bound", o_ub, "Known bound on n");

    // regress
    auto* reg = app.add_subcommand("regress", "Fit mean phases against n");
    std::string in_path;
    reg->add_option("--in", in_path, "Summary CSV produced by simulate")->required();

    try {
        app.parse(argc, argv);

        if (sim->parsed()) {
            beep::BatchConfig cfg;
            const auto protocol = beep::parse_protocol(protocol_str);
            cfg.protocol = *protocol;
            cfg.variant = beep::required_variant(*protocol);
            cfg.n_values = n_values;
            cfg.runs = runs;
            cfg.master_seed = parse_seed(seed_str);
            cfg.phase_cap = phase_cap;
            cfg.jobs = jobs;
            const bool has_eps = sim->count("--epsilon") > 0;
            const bool has_r = sim->count("--r") > 0;
            const bool has_ub = sim->count("--upper-bound") > 0;
            if (cfg.protocol == beep::Protocol::BLMonteCarlo) {
                if (has_eps == has_r)
                    throw CLI::ValidationError(
                        "bl-mc needs exactly one of --epsilon or --r");
                if (has_ub && !has_eps)
                    throw CLI::ValidationError("--upper-bound needs --epsilon");
                if (has_r) {
                    if (rflag < 1 || rflag > 64)
                        throw CLI::ValidationError("--r must lie in [1, 64]");
                    cfg.emulation_rounds = rflag;
                } else if (has_ub) {
                    cfg.r_policy = beep::RPolicy::global(epsilon, upper_bound);
                } else {
                    cfg.r_policy = beep::RPolicy::per_node(epsilon);
                }
            } else if (has_eps || has_r || has_ub) {
                throw CLI::ValidationError(
                    "--epsilon/--r/--upper-bound apply to bl-mc only");
            }
            return cmd_simulate(cfg, out_path, summary_path, trace);
        }

        if (probs->parsed()) {
            if (o_k > 0xffffffffULL)
                throw std::invalid_argument("phase-probs: k out of range");
            const auto p =
                beep::phase_probs(static_cast<std::uint32_t>(o_k), o_nprime);
            std::printf("%.12g,%.12g,%.12g\n", p.p_none, p.p_single, p.p_collision);
            return 0;
        }
        if (expect->parsed()) {
            const auto r = beep::expected_phases_exact(o_n, o_kcap, o_tol);
            std::printf("%s\n", format_real(r.value).c_str());
            std::fprintf(stderr,
                         "k_cap=%u residual=%.3e truncation_gap=%.3e\n", r.k_cap,
                         r.residual, r.truncation_gap);
            return 0;
        }
        if (chern->parsed()) {
            std::printf("%s\n", format_real(beep::chernoff_tail(o_n)).c_str());
            return 0;
        }
        if (chooser->parsed()) {
            beep::RPolicy policy;
            if (o_policy == "per-node") {
                if (chooser->count("--epsilon") == 0)
                    throw CLI::ValidationError("per-node needs --epsilon");
                policy = beep::RPolicy::per_node(o_eps);
            } else if (o_policy == "global") {
                if (chooser->count("--epsilon") == 0 ||
                    chooser->count("--upper-bound") == 0)
                    throw CLI::ValidationError("global needs --epsilon and --upper-bound");
                policy = beep::RPolicy::global(o_eps, o_ub);
            } else {
                if (chooser->count("--upper-bound") == 0)
                    throw CLI::ValidationError("whp needs --upper-bound");
                policy = beep::RPolicy::whp(o_ub);
            }
            std::printf("%d\n", beep::choose_r(policy));
            return 0;
        }
        if (reg->parsed()) {
            const auto rows = beep::read_summary_csv(in_path);
            std::vector<std::pair<double, double>> points;
            for (const auto& row : rows)
                points.emplace_back(static_cast<double>(row.n), row.mean_phases);
            beep::Regression fit;
            try {
                fit = beep::linear_regression(points);
            } catch (const std::invalid_argument& e) {
                std::fprintf(stderr, "%s\n", e.what());
                return 64;
            }
            std::printf("slope=%.12g intercept=%.12g relative_error=%.12g\n",
                        fit.slope, fit.intercept, fit.relative_error);
            return 0;
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "%s\nRun with --help for usage.\n", e.what());
        return 64;
    } catch (const beep::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 3;
    } catch (const beep::CsvError& e) {
        std::fprintf(stderr, "line %zu: %s\n", e.line, e.what());
        return 65;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 64;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
    return 0;
}

#include "beepsim/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "beepsim/rng.hpp"

namespace beep {

int effective_rounds(const BatchConfig& config) {
    if (config.protocol != Protocol::BLMonteCarlo) return 0;
    if (config.emulation_rounds > 0) {
        if (config.emulation_rounds > 64)
            throw ConfigError("bl-mc supports at most 64 detection rounds");
        return config.emulation_rounds;
    }
    if (config.r_policy) {
        try {
            return choose_r(*config.r_policy);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    throw ConfigError("bl-mc needs detection rounds: give r or an epsilon policy");
}

void validate_batch(const BatchConfig& config) {
    if (config.n_values.empty()) throw ConfigError("batch needs at least one n");
    if (config.runs < 1) throw ConfigError("batch needs at least one run per n");
    if (config.variant != required_variant(config.protocol))
        throw ConfigError(std::string("protocol ") +
                          std::string(protocol_name(config.protocol)) + " runs in " +
                          std::string(variant_name(required_variant(config.protocol))) +
                          ", not " + std::string(variant_name(config.variant)));
    for (std::uint64_t n : config.n_values) {
        if (n < 1) throw ConfigError("every n must be >= 1");
        if (config.protocol == Protocol::BLcd && n < 2)
            throw ConfigError(
                "blcd cannot count a single node; its winner check waits for a "
                "reply that no other node exists to send");
    }
    effective_rounds(config);
}

namespace {

RunConfig batch_run_config(const BatchConfig& config) {
    RunConfig rc;
    rc.phase_cap = config.phase_cap;
    rc.emulation_rounds = effective_rounds(config);
    rc.record_sizes = false;
    return rc;
}

}  // namespace

std::vector<RunResult> run_batch_serial(const BatchConfig& config) {
    validate_batch(config);
    const RunConfig rc = batch_run_config(config);
    std::vector<RunResult> out;
    out.reserve(config.n_values.size() * config.runs);
    RunScratch scratch;
    for (std::uint64_t n : config.n_values) {
        for (std::uint64_t run = 0; run < config.runs; ++run) {
            const std::uint64_t seed = derive_run_seed(config.master_seed, n, run);
            RunResult r =
                run_protocol(config.protocol, n, config.variant, seed, rc, scratch);
            r.run_id = run;
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<RunResult> run_batch_parallel(const BatchConfig& config) {
    validate_batch(config);
    const RunConfig rc = batch_run_config(config);
    const std::uint64_t cells = config.n_values.size();
    const std::uint64_t total = cells * config.runs;
    std::vector<RunResult> out(total);
    const int jobs = std::max(1, config.jobs);

    bool failed = false;
    std::string error;
#pragma omp parallel num_threads(jobs)
    {
        RunScratch scratch;
#pragma omp for schedule(dynamic, 8)
        for (long long idx = 0; idx < static_cast<long long>(total); ++idx) {
            const std::uint64_t i = static_cast<std::uint64_t>(idx);
            const std::uint64_t n = config.n_values[i / config.runs];
            const std::uint64_t run = i % config.runs;
            try {
                const std::uint64_t seed = derive_run_seed(config.master_seed, n, run);
                RunResult r =
                    run_protocol(config.protocol, n, config.variant, seed, rc, scratch);
                r.run_id = run;
                out[i] = std::move(r);
            } catch (const std::exception& e) {
#pragma omp critical
                {
                    failed = true;
                    error = e.what();
                }
            }
        }
    }
    if (failed) throw ConfigError(error);
    return out;
}

std::vector<RunResult> run_batch(const BatchConfig& config) {
    return config.jobs <= 1 ? run_batch_serial(config) : run_batch_parallel(config);
}

BatchSummary summarize(const std::vector<RunResult>& results) {
    if (results.empty()) throw std::invalid_argument("summarize: no results");

    struct Acc {
        std::uint64_t runs = 0;
        std::uint64_t sum = 0;
        unsigned __int128 sumsq = 0;
        std::uint64_t min = ~0ULL;
        std::uint64_t max = 0;
        std::uint64_t incorrect = 0;
        std::uint64_t aborted = 0;
    };
    // Keyed by (protocol, variant bits, n); map order fixes the row order.
    std::map<std::tuple<int, int, std::uint64_t>, Acc> groups;
    for (const auto& r : results) {
        const int vbits = (r.variant.speaker_cd ? 2 : 0) | (r.variant.listener_cd ? 1 : 0);
        Acc& a = groups[{static_cast<int>(r.protocol), vbits, r.n}];
        ++a.runs;
        a.sum += r.phases;
        a.sumsq += static_cast<unsigned __int128>(r.phases) * r.phases;
        a.min = std::min(a.min, r.phases);
        a.max = std::max(a.max, r.phases);
        if (r.aborted)
            ++a.aborted;
        else if (!r.correct)
            ++a.incorrect;
    }

    BatchSummary summary;
    for (const auto& [key, a] : groups) {
        SummaryRow row;
        row.protocol = static_cast<Protocol>(std::get<0>(key));
        const int vbits = std::get<1>(key);
        row.variant = ModelVariant{(vbits & 2) != 0, (vbits & 1) != 0};
        row.n = std::get<2>(key);
        row.runs = a.runs;
        row.mean_phases = static_cast<double>(a.sum) / static_cast<double>(a.runs);
        if (a.runs > 1) {
            // m*sumsq - sum^2 is exact in 128-bit, so the variance is
            // independent of accumulation order
            const unsigned __int128 num =
                static_cast<unsigned __int128>(a.runs) * a.sumsq -
                static_cast<unsigned __int128>(a.sum) * a.sum;
            const long double var = static_cast<long double>(num) /
                                    (static_cast<long double>(a.runs) *
                                     static_cast<long double>(a.runs - 1));
            row.std_phases = static_cast<double>(std::sqrt(var));
        }
        row.min_phases = a.min;
        row.max_phases = a.max;
        row.incorrect = a.incorrect;
        row.aborted = a.aborted;
        summary.rows.push_back(row);
    }

    std::vector<std::pair<double, double>> points;
    for (const auto& row : summary.rows)
        points.emplace_back(static_cast<double>(row.n), row.mean_phases);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end(),
                             [](auto& a, auto& b) { return a.first == b.first; }),
                 points.end());
    if (points.size() >= 2) summary.regression = linear_regression(points);
    return summary;
}

Regression linear_regression(const std::vector<std::pair<double, double>>& points) {
    double distinct = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool fresh = true;
        for (std::size_t j = 0; j < i; ++j)
            fresh = fresh && points[j].first != points[i].first;
        distinct += fresh;
    }
    if (distinct < 2)
        throw std::invalid_argument(
            "linear_regression: needs at least two distinct x values");

    const double m = static_cast<double>(points.size());
    double sx = 0, sy = 0;
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
    }
    const double xbar = sx / m, ybar = sy / m;
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }

    Regression reg;
    reg.slope = sxy / sxx;
    reg.intercept = ybar - reg.slope * xbar;

    if (points.size() > 2) {
        double rss = 0;
        for (const auto& [x, y] : points) {
            const double e = y - (reg.intercept + reg.slope * x);
            rss += e * e;
        }
        const double se = std::sqrt(std::max(0.0, rss / (m - 2.0)) / sxx);
        if (se == 0.0)
            reg.relative_error = 0.0;
        else if (reg.slope != 0.0)
            reg.relative_error = se / std::abs(reg.slope);
        else
            reg.relative_error = std::numeric_limits<double>::infinity();
    }
    return reg;
}

namespace {

constexpr char kResultsHeader[] =
    "protocol,variant,n,run_id,seed,phases,slots,correct,reported_size_min,"
    "reported_size_max,aborted";
constexpr char kSummaryHeader[] =
    "protocol,variant,n,runs,mean_phases,std_phases,min_phases,max_phases,"
    "incorrect,aborted";

void write_file(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

std::string format_results_csv(const std::vector<RunResult>& results) {
    std::vector<std::size_t> order(results.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(results[a].n, results[a].run_id) <
               std::tie(results[b].n, results[b].run_id);
    });

    std::string out;
    out.reserve(results.size() * 64 + 80);
    out += kResultsHeader;
    out += '\n';
    char line[192];
    for (std::size_t idx : order) {
        const RunResult& r = results[idx];
        const auto pn = protocol_name(r.protocol);
        const auto vn = variant_name(r.variant);
        std::snprintf(line, sizeof line,
                      "%.*s,%.*s,%llu,%llu,%llu,%llu,%llu,%d,%u,%u,%d\n",
                      static_cast<int>(pn.size()), pn.data(),
                      static_cast<int>(vn.size()), vn.data(),
                      static_cast<unsigned long long>(r.n),
                      static_cast<unsigned long long>(r.run_id),
                      static_cast<unsigned long long>(r.seed),
                      static_cast<unsigned long long>(r.phases),
                      static_cast<unsigned long long>(r.slots), r.correct ? 1 : 0,
                      r.size_min, r.size_max, r.aborted ? 1 : 0);
        out += line;
    }
    return out;
}

std::string format_summary_csv(const BatchSummary& summary) {
    std::string out;
    out.reserve(summary.rows.size() * 96 + 80);
    out += kSummaryHeader;
    out += '\n';
    char line[224];
    for (const auto& row : summary.rows) {
        const auto pn = protocol_name(row.protocol);
        const auto vn = variant_name(row.variant);
        std::snprintf(line, sizeof line,
                      "%.*s,%.*s,%llu,%llu,%.10g,%.10g,%llu,%llu,%llu,%llu\n",
                      static_cast<int>(pn.size()), pn.data(),
                      static_cast<int>(vn.size()), vn.data(),
                      static_cast<unsigned long long>(row.n),
                      static_cast<unsigned long long>(row.runs), row.mean_phases,
                      row.std_phases, static_cast<unsigned long long>(row.min_phases),
                      static_cast<unsigned long long>(row.max_phases),
                      static_cast<unsigned long long>(row.incorrect),
                      static_cast<unsigned long long>(row.aborted));
        out += line;
    }
    return out;
}

void write_results_csv(const std::vector<RunResult>& results, const std::string& path) {
    write_file(format_results_csv(results), path);
}

void write_summary_csv(const BatchSummary& summary, const std::string& path) {
    write_file(format_summary_csv(summary), path);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::uint64_t parse_u64(const std::string& field, std::size_t line_no) {
    std::uint64_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw CsvError("expected an unsigned integer, got '" + field + "'", line_no);
    return value;
}

double parse_f64(const std::string& field, std::size_t line_no) {
    double value = 0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw CsvError("expected a number, got '" + field + "'", line_no);
    return value;
}

}  // namespace

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open: " + path, 0);

    std::vector<SummaryRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (line != kSummaryHeader)
                throw CsvError("bad header, expected '" + std::string(kSummaryHeader) +
                                   "'",
                               line_no);
            continue;
        }
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 10)
            throw CsvError("expected 10 fields, got " + std::to_string(fields.size()),
                           line_no);
        SummaryRow row;
        const auto protocol = parse_protocol(fields[0]);
        if (!protocol) throw CsvError("unknown protocol '" + fields[0] + "'", line_no);
        row.protocol = *protocol;
        row.variant = required_variant(*protocol);
        if (fields[1] != variant_name(row.variant))
            throw CsvError("variant '" + fields[1] + "' does not match protocol '" +
                               fields[0] + "'",
                           line_no);
        row.n = parse_u64(fields[2], line_no);
        row.runs = parse_u64(fields[3], line_no);
        row.mean_phases = parse_f64(fields[4], line_no);
        row.std_phases = parse_f64(fields[5], line_no);
        row.min_phases = parse_u64(fields[6], line_no);
        row.max_phases = parse_u64(fields[7], line_no);
        row.incorrect = parse_u64(fields[8], line_no);
        row.aborted = parse_u64(fields[9], line_no);
        rows.push_back(row);
    }
    if (line_no == 0) throw CsvError("empty file: " + path, 0);
    return rows;
}

}  // namespace beep

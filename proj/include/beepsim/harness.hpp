#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "beepsim/emulation.hpp"
#include "beepsim/simulator.hpp"

namespace beep {

struct BatchConfig {
    Protocol protocol = Protocol::BcdL;
    ModelVariant variant = kBcdL;
    std::vector<std::uint64_t> n_values;
    std::uint64_t runs = 1;
    std::uint64_t master_seed = 1;
    std::optional<RPolicy> r_policy;  // bl-mc only
    int emulation_rounds = 0;         // explicit r; takes precedence over the policy
    std::uint64_t phase_cap = 0;      // 0 means 10000 * n
    int jobs = 1;
};

// Detection rounds a bl-mc batch will use; 0 for the Las Vegas protocols.
int effective_rounds(const BatchConfig& config);

// Throws ConfigError before any run starts when the combination is invalid.
void validate_batch(const BatchConfig& config);

// Run seeds derive from (master_seed, n, run_id), so the result list is a
// pure function of the config, independent of execution order and job count.
std::vector<RunResult> run_batch_serial(const BatchConfig& config);
std::vector<RunResult> run_batch_parallel(const BatchConfig& config);
std::vector<RunResult> run_batch(const BatchConfig& config);  // dispatches on jobs

struct SummaryRow {
    Protocol protocol{};
    ModelVariant variant{};
    std::uint64_t n = 0;
    std::uint64_t runs = 0;
    double mean_phases = 0.0;
    double std_phases = 0.0;  // sample convention, divisor runs - 1
    std::uint64_t min_phases = 0;
    std::uint64_t max_phases = 0;
    std::uint64_t incorrect = 0;  // finished with some node reporting wrongly
    std::uint64_t aborted = 0;    // stopped by the phase cap
};

struct Regression {
    double slope = 0.0;
    double intercept = 0.0;
    double relative_error = 0.0;  // standard error of the slope over |slope|
};

struct BatchSummary {
    std::vector<SummaryRow> rows;          // sorted by (protocol, variant, n)
    std::optional<Regression> regression;  // present with >= 2 distinct n
};

// Order-independent aggregation; phase moments are accumulated in integers.
// Throws std::invalid_argument on an empty result list.
BatchSummary summarize(const std::vector<RunResult>& results);

// Unweighted least squares of y against x over (x, y) points.
// Throws std::invalid_argument with fewer than two distinct x values.
Regression linear_regression(const std::vector<std::pair<double, double>>& points);

// CSV emission. Row order is (n, run_id) for results and summary row order
// for summaries; the bytes are a pure function of the data.
std::string format_results_csv(const std::vector<RunResult>& results);
std::string format_summary_csv(const BatchSummary& summary);
void write_results_csv(const std::vector<RunResult>& results, const std::string& path);
void write_summary_csv(const BatchSummary& summary, const std::string& path);

// Parse failure with the 1-based line it happened on (0 for file-level).
class CsvError : public std::runtime_error {
  public:
    CsvError(const std::string& what, std::size_t line_no)
        : std::runtime_error(what), line(line_no) {}
    std::size_t line;
};

std::vector<SummaryRow> read_summary_csv(const std::string& path);

}  // namespace beep

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beepsim/harness.hpp"

namespace {

template <typename F>
double timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Times the serial batch runner against the OpenMP one and "
                 "checks that they produce identical results"};
    std::string protocol_str = "bcdl";
    std::vector<std::uint64_t> n_values{64};
    std::uint64_t runs = 2000;
    std::uint64_t seed = 1;
    int jobs = 4, rflag = 4;
    app.add_option("--protocol", protocol_str, "bcdl, bcdlcd, blcd, or bl-mc")
        ->check(CLI::IsMember({"bcdl", "bcdlcd", "blcd", "bl-mc"}))
        ->capture_default_str();
    app.add_option("--n", n_values, "Node counts")->capture_default_str();
    app.add_option("--runs", runs, "Runs per n")->capture_default_str();
    app.add_option("--seed", seed, "Master seed")->capture_default_str();
    app.add_option("--jobs", jobs, "Threads for the parallel runner")
        ->capture_default_str();
    app.add_option("--r", rflag, "Detection rounds (bl-mc only)")
        ->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    beep::BatchConfig cfg;
    const auto protocol = beep::parse_protocol(protocol_str);
    cfg.protocol = *protocol;
    cfg.variant = beep::required_variant(*protocol);
    cfg.n_values = n_values;
    cfg.runs = runs;
    cfg.master_seed = seed;
    cfg.jobs = jobs;
    if (cfg.protocol == beep::Protocol::BLMonteCarlo) cfg.emulation_rounds = rflag;

    std::vector<beep::RunResult> serial, parallel;
    const double t_serial = timed([&] { serial = beep::run_batch_serial(cfg); });
    const double t_parallel = timed([&] { parallel = beep::run_batch_parallel(cfg); });

    const std::string a = beep::format_results_csv(serial);
    const std::string b = beep::format_results_csv(parallel);
    const bool identical = a == b;

    std::string n_list;
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        if (i) n_list += ',';
        n_list += std::to_string(n_values[i]);
    }
    std::printf("%s n={%s} x %llu runs, jobs=%d\n", protocol_str.c_str(),
                n_list.c_str(), static_cast<unsigned long long>(runs), jobs);
    std::printf("serial   %.3f s\n", t_serial);
    std::printf("parallel %.3f s  (speedup %.2fx)\n", t_parallel,
                t_parallel > 0 ? t_serial / t_parallel : 0.0);
    std::printf("results identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}

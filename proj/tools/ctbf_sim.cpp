// Command-line front end: `run` executes a scenario (optionally a sweep over
// subscriber count or bucket multiplier, several seeds, TBF and/or CTBF) and
// writes one CSV; `compare` reports per-metric ratios between two such CSVs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ctbf/scenario.hpp"
#include "ctbf/sweep.hpp"

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("CTBF_OUT_DIR");
    return env != nullptr && *env != '\0' ? env : ".";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

const char* mode_name(ctbf::ShapingMode mode) {
    return mode == ctbf::ShapingMode::Ctbf ? "CTBF" : "TBF";
}

int run_command(const std::string& scenario_path, const std::string& policy,
                unsigned subscribers, long long seed, double duration, double warmup,
                std::string out_path, const std::string& profile, unsigned jobs) {
    ctbf::Scenario scenario = ctbf::load_scenario(scenario_path);

    if (!profile.empty())
        ctbf::apply_profile(scenario, profile);
    if (!policy.empty()) {
        if (policy == "TBF")
            scenario.policies = ctbf::PolicySelection::TbfOnly;
        else if (policy == "CTBF")
            scenario.policies = ctbf::PolicySelection::CtbfOnly;
        else if (policy == "BOTH")
            scenario.policies = ctbf::PolicySelection::Both;
        else
            throw ctbf::ScenarioError("--policy must be TBF, CTBF or BOTH");
    }
    if (subscribers != 0) {
        scenario.subscriber_count = subscribers;
        scenario.rates_bps.clear();
        if (scenario.sweep_axis == ctbf::SweepAxis::SubscriberCount)
            scenario.sweep_axis = ctbf::SweepAxis::None;
    }
    if (seed >= 0)
        scenario.seeds = {static_cast<uint64_t>(seed)};
    if (duration > 0.0)
        scenario.duration_s = duration;
    if (warmup >= 0.0)
        scenario.warmup_s = warmup;
    ctbf::validate_scenario(scenario);

    if (out_path.empty())
        out_path = default_out_dir() + "/" + scenario.name + ".csv";

    const ctbf::SweepResult result = ctbf::run_sweep(scenario, jobs);

    std::filesystem::path out_file(out_path);
    if (out_file.has_parent_path())
        std::filesystem::create_directories(out_file.parent_path());
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + out_path);
    out << result.csv;
    out.close();

    uint64_t runs = result.diagnostics.size();
    std::printf("%s: %llu run(s), %llu events, csv: %s\n", scenario.name.c_str(),
                static_cast<unsigned long long>(runs),
                static_cast<unsigned long long>(result.total_events), out_path.c_str());
    for (const auto& diag : result.diagnostics) {
        if (diag.validation.ok())
            continue;
        std::fprintf(stderr,
                     "invariant violation: point=%g seed=%llu policy=%s "
                     "(conservation=%d rel_err=%.3g, delivered_bound=%d, token_closure=%d)\n",
                     diag.sweep_value, static_cast<unsigned long long>(diag.seed),
                     mode_name(diag.mode), diag.validation.conservation_ok ? 1 : 0,
                     diag.validation.max_conservation_rel_error,
                     diag.validation.delivered_bound_ok ? 1 : 0,
                     diag.validation.token_closure_ok ? 1 : 0);
    }
    return result.all_valid ? 0 : 2;
}

int compare_command(const std::string& baseline_path, const std::string& candidate_path,
                    const std::string& baseline_policy, const std::string& candidate_policy) {
    const auto rows = ctbf::compare_csv(read_file(baseline_path), read_file(candidate_path),
                                        baseline_policy, candidate_policy);
    std::cout << ctbf::format_compare(rows);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Token-bucket traffic shaping simulator (TBF and cooperative TBF)"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string policy;
    unsigned subscribers = 0;
    long long seed = -1;
    double duration = 0.0;
    double warmup = -1.0;
    std::string out_path;
    std::string profile;
    unsigned jobs = 0;

    CLI::App* run = app.add_subcommand("run", "Run a scenario and write a CSV");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--policy", policy, "Override policies: TBF, CTBF or BOTH");
    run->add_option("--subscribers", subscribers,
                    "Override subscriber count (disables a subscriber-count sweep)");
    run->add_option("--seed", seed, "Run a single seed instead of the scenario's list");
    run->add_option("--duration", duration, "Override run duration in seconds");
    run->add_option("--warmup", warmup, "Override warm-up period in seconds");
    run->add_option("--out", out_path,
                    "Output CSV path (default: $CTBF_OUT_DIR/<name>.csv, CTBF_OUT_DIR "
                    "defaulting to '.')");
    run->add_option("--profile", profile, "Apply a run-length profile: desk or paper");
    run->add_option("--jobs", jobs, "Worker threads for sweep points (0 = hardware)");

    std::string baseline_path, candidate_path;
    std::string baseline_policy = "auto", candidate_policy = "auto";
    CLI::App* compare = app.add_subcommand("compare", "Per-metric ratios of two sweep CSVs");
    compare->add_option("baseline", baseline_path, "Baseline CSV")->required();
    compare->add_option("candidate", candidate_path, "Candidate CSV")->required();
    compare->add_option("--baseline-policy", baseline_policy, "TBF, CTBF or auto");
    compare->add_option("--candidate-policy", candidate_policy, "TBF, CTBF or auto");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return run_command(scenario_path, policy, subscribers, seed, duration, warmup,
                               out_path, profile, jobs);
        return compare_command(baseline_path, candidate_path, baseline_policy, candidate_policy);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
}

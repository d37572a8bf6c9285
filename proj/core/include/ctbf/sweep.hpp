#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctbf/scenario.hpp"
#include "ctbf/simulation.hpp"

namespace ctbf {

/// Run a batch of independent simulations, possibly in parallel. Results are
/// returned in task order regardless of scheduling. jobs = 0 picks the
/// hardware concurrency.
std::vector<RunResult> run_many(const std::vector<RunSettings>& tasks, unsigned jobs = 0);

struct RunDiagnostics {
    double sweep_value = 0.0;
    uint64_t seed = 0;
    ShapingMode mode = ShapingMode::Tbf;
    uint64_t events_executed = 0;
    ValidationReport validation;
};

struct SweepResult {
    /// One CSV for the whole sweep: a row per (sweep point, seed, subscriber)
    /// plus an ALL row per (sweep point, seed), with paired tbf_*/ctbf_*
    /// column groups. Cells of a policy that was not run stay empty.
    std::string csv;
    std::vector<RunDiagnostics> diagnostics;
    bool all_valid = true;
    uint64_t total_events = 0;
};

/// Expand the scenario's sweep axis x seeds x requested policies, run every
/// point (TBF and CTBF of one point share the seed, so they consume identical
/// workload schedules), and assemble the CSV.
SweepResult run_sweep(const Scenario& scenario, unsigned jobs = 0);

std::string csv_header();

/// Per-metric baseline/candidate means and their ratio, keyed by sweep value.
struct CompareRow {
    double sweep_value = 0.0;
    std::string metric;
    double baseline = 0.0;
    double candidate = 0.0;
    double ratio = 0.0;
};

/// Compare two sweep CSVs over their aggregate (ALL) rows, averaging each
/// metric across seeds per sweep value. `policy` selects the column group to
/// read from each file: "TBF", "CTBF", or "auto" (unambiguous files only).
std::vector<CompareRow> compare_csv(const std::string& baseline_csv,
                                    const std::string& candidate_csv,
                                    const std::string& baseline_policy = "auto",
                                    const std::string& candidate_policy = "auto");

std::string format_compare(const std::vector<CompareRow>& rows);

} // namespace ctbf

// Acceptance suite: one pass/fail line per criterion, exit 0 only when all
// criteria hold. Run times are desk scale (a few minutes on one core).

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ctbf/controller.hpp"
#include "ctbf/scenario.hpp"
#include "ctbf/simulation.hpp"
#include "ctbf/sweep.hpp"

using namespace ctbf;

namespace {

struct CriterionResult {
    bool pass = false;
    std::string detail;
};

std::vector<ValidationReport> g_validations;   // every simulated run feeds criterion 6

void collect_validations(const std::vector<RunResult>& results) {
    for (const auto& r : results)
        g_validations.push_back(r.validation);
}

std::string fmt(const char* format, ...) {
    va_list args;
    va_start(args, format);
    char buffer[512];
    std::vsnprintf(buffer, sizeof(buffer), format, args);
    va_end(args);
    return buffer;
}

bool close_rel(double value, double expected, double tolerance) {
    return std::abs(value - expected) <= tolerance * std::abs(expected);
}

std::vector<SubscriberProfile> uniform_profiles(uint32_t n, double rate, double multiplier) {
    std::vector<SubscriberProfile> profiles;
    for (uint32_t i = 0; i < n; ++i)
        profiles.push_back({i, rate, multiplier});
    return profiles;
}

// ---------------------------------------------------------------------------

CriterionResult criterion_1_defined_cap_reference() {
    const std::vector<SubscriberProfile> profiles = {{0, 8e6, 8.0}, {1, 10e6, 8.0}, {2, 5e6, 8.0}};
    const std::vector<Activity> states = {Activity::Active, Activity::Inactive, Activity::Active};
    DistributionPolicy policy;
    policy.kind = DistributionKind::DefinedCap;
    policy.cap_multiplier = 100.0;   // non-binding
    policy.retention_fraction = 0.10;

    const DistributionOutcome out = compute_outcome(profiles, states, policy);
    const double bonus_a = 9e6 * 8.0 / 13.0;    // 5.538461... Mbps
    const double bonus_c = 9e6 * 5.0 / 13.0;    // 3.461538... Mbps
    const double substitute_b = 1e6;

    const bool pass = close_rel(out.rate_modifier[0], bonus_a, 1e-9) &&
                      close_rel(out.rate_modifier[2], bonus_c, 1e-9) &&
                      close_rel(out.rate_modifier[1], substitute_b, 1e-9);
    return {pass, fmt("bonuses %.6f / %.6f Mbps, substitute %.3f Mbps",
                      out.rate_modifier[0] / 1e6, out.rate_modifier[2] / 1e6,
                      out.rate_modifier[1] / 1e6)};
}

CriterionResult criterion_2_weight_example() {
    const std::vector<SubscriberProfile> profiles = {{0, 5e6, 8.0}, {1, 15e6, 8.0}};
    const double weight = contribution_weight(profiles[0], profiles);
    return {weight == 0.25, fmt("weight(5 of {5,15}) = %.17g", weight)};
}

CriterionResult criterion_3_bucket_sizing() {
    const double five = bucket_capacity_bytes(5e6, 8.0);
    const double eight = bucket_capacity_bytes(2e6, 32.0);
    const bool pass = five == 5'000'000.0 && eight == 8'000'000.0;
    return {pass, fmt("(5 Mbps, 8) -> %.0f B, (2 Mbps, 32) -> %.0f B", five, eight)};
}

CriterionResult criterion_4_cap_discard_threshold() {
    const auto profiles = uniform_profiles(10, 10e6, 8.0);
    DistributionPolicy policy;
    policy.kind = DistributionKind::DefinedCap;
    policy.cap_multiplier = 2.0;
    policy.retention_fraction = 0.0;

    std::vector<Activity> states(10, Activity::Active);
    for (int i = 0; i < 5; ++i)
        states[i] = Activity::Inactive;
    const DistributionOutcome five = compute_outcome(profiles, states, policy);

    states[5] = Activity::Inactive;
    const DistributionOutcome six = compute_outcome(profiles, states, policy);

    const bool pass = five.wasted_rate == 0.0 && six.wasted_rate > 0.0;
    return {pass, fmt("wasted: 5 inactive -> %.17g bps, 6 inactive -> %.6g bps",
                      five.wasted_rate, six.wasted_rate)};
}

CriterionResult criterion_5_balanced_waste_identity() {
    std::mt19937_64 rng(20'240'817);
    double worst = 0.0;
    for (int round = 0; round < 1'000; ++round) {
        const uint32_t n = 1 + rng() % 16;
        std::vector<SubscriberProfile> profiles;
        for (uint32_t i = 0; i < n; ++i)
            profiles.push_back({i, 0.25e6 * static_cast<double>(1 + rng() % 80), 8.0});
        std::vector<Activity> states;
        for (uint32_t i = 0; i < n; ++i)
            states.push_back(rng() % 2 == 0 ? Activity::Active : Activity::Inactive);
        DistributionPolicy policy;
        policy.kind = DistributionKind::Balanced;
        policy.retention_fraction = static_cast<double>(rng() % 101) / 100.0;

        const double pool = compute_pool(states, profiles, policy.retention_fraction);
        const DistributionOutcome out = distribute_balanced(pool, profiles, states, policy);

        double inactive_weight = 0.0;
        for (uint32_t i = 0; i < n; ++i)
            if (states[i] == Activity::Inactive)
                inactive_weight += contribution_weight(profiles[i], profiles);
        const double expected = pool * inactive_weight;
        if (expected > 0.0)
            worst = std::max(worst, std::abs(out.wasted_rate - expected) / expected);
        else if (out.wasted_rate != 0.0)
            worst = std::max(worst, 1.0);
    }
    return {worst <= 1e-9, fmt("1000 configurations, worst relative deviation %.3g", worst)};
}

CriterionResult criterion_6_conservation() {
    uint64_t runs = 0, recomputations = 0;
    double worst_rel = 0.0;
    bool ok = true;
    for (const auto& v : g_validations) {
        ++runs;
        recomputations += v.rate_recomputations;
        worst_rel = std::max(worst_rel, v.max_conservation_rel_error);
        ok = ok && v.conservation_ok && v.delivered_bound_ok && v.token_closure_ok;
    }
    return {ok && runs > 0,
            fmt("%llu runs, %llu recomputation points, worst conservation error %.3g rel; "
                "delivered-bits bound and token closure held in every run",
                static_cast<unsigned long long>(runs),
                static_cast<unsigned long long>(recomputations), worst_rel)};
}

CriterionResult criterion_7_degenerate_oracle() {
    std::mt19937_64 rng(7'777);
    int identical = 0;
    const int total = 100;
    for (int round = 0; round < total; ++round) {
        const uint32_t n = 2 + rng() % 5;
        const double multiplier = 6.0 + static_cast<double>(rng() % 11);
        std::vector<SubscriberProfile> profiles;
        for (uint32_t i = 0; i < n; ++i)
            profiles.push_back({i, 0.5e6 * static_cast<double>(2 + rng() % 15), multiplier});

        RunSettings base;
        base.profiles = profiles;
        base.duration_s = 20.0 + static_cast<double>(rng() % 21);
        base.warmup_s = 0.0;
        base.seed = rng();
        base.record_departures = true;

        RunSettings tbf = base;
        tbf.mode = ShapingMode::Tbf;
        RunSettings neutral = base;
        neutral.mode = ShapingMode::Ctbf;
        neutral.policy.retention_fraction = 1.0;

        const RunResult a = run_simulation(tbf);
        const RunResult b = run_simulation(neutral);
        g_validations.push_back(a.validation);
        g_validations.push_back(b.validation);

        bool same = a.departures.size() == b.departures.size();
        for (size_t i = 0; same && i < a.departures.size(); ++i)
            same = a.departures[i].completed_at == b.departures[i].completed_at &&
                   a.departures[i].subscriber == b.departures[i].subscriber &&
                   a.departures[i].length == b.departures[i].length;
        identical += same ? 1 : 0;
    }
    return {identical == total,
            fmt("%d/%d randomized scenarios produced bit-identical departure traces", identical,
                total)};
}

struct PolicyMeans {
    double ftp_bps = 0.0;
    double http_delay_s = 0.0;
};

// pooled across seeds: session- and sample-weighted means
PolicyMeans pooled_means(const std::vector<const RunResult*>& runs) {
    PolicyMeans means;
    double ftp_weight = 0.0, http_weight = 0.0;
    double ftp_sum = 0.0, http_sum = 0.0;
    for (const RunResult* run : runs) {
        const MetricsSummary& agg = run->report.aggregate;
        if (agg.ftp_sessions > 0) {
            ftp_sum += agg.mean_ftp_throughput_bps * static_cast<double>(agg.ftp_sessions);
            ftp_weight += static_cast<double>(agg.ftp_sessions);
        }
        if (agg.http_samples > 0) {
            http_sum += agg.mean_http_delay_s * static_cast<double>(agg.http_samples);
            http_weight += static_cast<double>(agg.http_samples);
        }
    }
    means.ftp_bps = ftp_weight > 0.0 ? ftp_sum / ftp_weight : 0.0;
    means.http_delay_s = http_weight > 0.0 ? http_sum / http_weight : 0.0;
    return means;
}

RunSettings reproduction_point(uint32_t n, double multiplier, uint64_t seed, ShapingMode mode) {
    RunSettings settings;
    settings.profiles = uniform_profiles(n, 2e6, multiplier);
    settings.mode = mode;
    settings.duration_s = 900.0;
    settings.warmup_s = 120.0;
    settings.seed = seed;
    return settings;
}

CriterionResult criterion_8_subscriber_trend() {
    const std::vector<uint32_t> counts = {2, 10, 25, 50};
    const std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};

    std::vector<RunSettings> tasks;
    for (uint32_t n : counts)
        for (uint64_t seed : seeds) {
            tasks.push_back(reproduction_point(n, 8.0, seed, ShapingMode::Tbf));
            tasks.push_back(reproduction_point(n, 8.0, seed, ShapingMode::Ctbf));
        }
    const std::vector<RunResult> runs = run_many(tasks);
    collect_validations(runs);

    bool pass = true;
    double best_gain = 0.0;
    std::string detail;
    size_t task = 0;
    for (uint32_t n : counts) {
        std::vector<const RunResult*> tbf_runs, ctbf_runs;
        for (size_t s = 0; s < seeds.size(); ++s) {
            tbf_runs.push_back(&runs[task++]);
            ctbf_runs.push_back(&runs[task++]);
        }
        const PolicyMeans tbf = pooled_means(tbf_runs);
        const PolicyMeans ctbf = pooled_means(ctbf_runs);
        const double gain = tbf.ftp_bps > 0.0 ? ctbf.ftp_bps / tbf.ftp_bps : 0.0;
        if (n <= 25)
            best_gain = std::max(best_gain, gain);
        pass = pass && ctbf.ftp_bps > tbf.ftp_bps && ctbf.http_delay_s <= tbf.http_delay_s;
        detail += fmt("N=%u ftp x%.2f delay %.3f/%.3f s; ", n, gain, ctbf.http_delay_s,
                      tbf.http_delay_s);
    }
    pass = pass && best_gain >= 1.5;
    detail += fmt("best ftp gain at N<=25: x%.2f", best_gain);
    return {pass, detail};
}

CriterionResult criterion_9_bucket_convergence() {
    const std::vector<double> multipliers = {8.0, 32.0, 64.0};
    const std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};

    std::vector<RunSettings> tasks;
    for (double m : multipliers)
        for (uint64_t seed : seeds) {
            tasks.push_back(reproduction_point(2, m, seed, ShapingMode::Tbf));
            tasks.push_back(reproduction_point(2, m, seed, ShapingMode::Ctbf));
        }
    const std::vector<RunResult> runs = run_many(tasks);
    collect_validations(runs);

    bool pass = true;
    std::string detail;
    size_t task = 0;
    for (double m : multipliers) {
        std::vector<const RunResult*> tbf_runs, ctbf_runs;
        for (size_t s = 0; s < seeds.size(); ++s) {
            tbf_runs.push_back(&runs[task++]);
            ctbf_runs.push_back(&runs[task++]);
        }
        const double tbf = pooled_means(tbf_runs).ftp_bps;
        const double ctbf = pooled_means(ctbf_runs).ftp_bps;
        const double rel = tbf > 0.0 ? std::abs(ctbf - tbf) / tbf : 0.0;
        if (m == 8.0)
            pass = pass && rel >= 0.25;
        else
            pass = pass && rel <= 0.10;
        detail += fmt("mult %.0f: ftp %.2f vs %.2f Mbps (%.1f%%); ", m, ctbf / 1e6, tbf / 1e6,
                      rel * 100.0);
    }
    return {pass, detail};
}

CriterionResult criterion_10_determinism() {
    Scenario scenario;
    scenario.name = "determinism";
    scenario.duration_s = 60.0;
    scenario.warmup_s = 10.0;
    scenario.seeds = {1, 2};
    scenario.policies = PolicySelection::Both;
    scenario.sweep_axis = SweepAxis::SubscriberCount;
    scenario.sweep_values = {2, 3};
    validate_scenario(scenario);

    const SweepResult first = run_sweep(scenario);
    const SweepResult second = run_sweep(scenario);
    for (const auto& diag : first.diagnostics)
        g_validations.push_back(diag.validation);

    const bool pass = !first.csv.empty() && first.csv == second.csv;
    return {pass, fmt("two sweeps, %zu bytes of CSV, byte-identical: %s", first.csv.size(),
                      pass ? "yes" : "no")};
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* label;
        CriterionResult (*check)();
    };
    const Entry entries[] = {
        {1, "defined-cap reference allocation (8/10/5 Mbps, one idle)",
         criterion_1_defined_cap_reference},
        {2, "contribution weight example (5 of {5,15} = 0.25)", criterion_2_weight_example},
        {3, "proportional bucket sizing", criterion_3_bucket_sizing},
        {4, "defined-cap discard threshold (10 x 10 Mbps, cap 2)",
         criterion_4_cap_discard_threshold},
        {5, "balanced waste identity over random configurations",
         criterion_5_balanced_waste_identity},
        {7, "full retention reproduces plain shaping bit-for-bit",
         criterion_7_degenerate_oracle},
        {8, "subscriber sweep trend at desk scale", criterion_8_subscriber_trend},
        {9, "bucket-size convergence at two subscribers", criterion_9_bucket_convergence},
        {10, "byte-identical CSV for identical (scenario, seed)", criterion_10_determinism},
        {6, "rate conservation and delivery bounds in every simulated run",
         criterion_6_conservation},
    };

    CriterionResult results[11];
    for (const Entry& entry : entries) {
        std::fprintf(stderr, "running criterion %d...\n", entry.id);
        results[entry.id] = entry.check();
    }

    bool all_pass = true;
    for (int id = 1; id <= 10; ++id) {
        const CriterionResult& r = results[id];
        std::printf("[%s] criterion %2d: %s\n", r.pass ? "PASS" : "FAIL", id, r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    std::printf("%s\n", all_pass ? "acceptance: ALL CRITERIA PASS" : "acceptance: FAILURES");
    return all_pass ? 0 : 1;
}

#include "ctbf/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ctbf {

std::vector<RunResult> run_many(const std::vector<RunSettings>& tasks, unsigned jobs) {
    std::vector<RunResult> results(tasks.size());
    if (tasks.empty())
        return results;

    unsigned workers = jobs != 0 ? jobs : std::thread::hardware_concurrency();
    if (workers == 0)
        workers = 1;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(tasks.size()));

    if (workers == 1) {
        for (size_t i = 0; i < tasks.size(); ++i)
            results[i] = run_simulation(tasks[i]);
        return results;
    }

    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
                    results[i] = run_simulation(tasks[i]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (const auto& err : errors)
        if (err)
            std::rethrow_exception(err);
    return results;
}

namespace {

const char* const kSummaryColumns[] = {
    "http_samples",         "mean_http_delay_s",      "stdev_http_delay_s",
    "ftp_sessions",         "mean_ftp_throughput_bps", "stdev_ftp_throughput_bps",
    "frames_considered",    "frames_decodable",        "decodable_frame_rate",
    "tokens_generated_bytes", "tokens_discarded_bytes", "sharing_efficiency",
    "delivered_bytes",
};

std::string format_double(double value) {
    if (std::isnan(value))
        return {};
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

void append_summary_cells(std::string& out, const MetricsSummary* summary) {
    const size_t columns = std::size(kSummaryColumns);
    if (summary == nullptr) {
        for (size_t i = 0; i < columns; ++i)
            out += ',';
        return;
    }
    out += ',' + std::to_string(summary->http_samples);
    out += ',' + format_double(summary->mean_http_delay_s);
    out += ',' + format_double(summary->stdev_http_delay_s);
    out += ',' + std::to_string(summary->ftp_sessions);
    out += ',' + format_double(summary->mean_ftp_throughput_bps);
    out += ',' + format_double(summary->stdev_ftp_throughput_bps);
    out += ',' + std::to_string(summary->frames_considered);
    out += ',' + std::to_string(summary->frames_decodable);
    out += ',' + format_double(summary->decodable_frame_rate);
    out += ',' + format_double(summary->tokens_generated);
    out += ',' + format_double(summary->tokens_discarded);
    out += ',' + format_double(summary->sharing_efficiency);
    out += ',' + std::to_string(summary->delivered_bytes);
}

const char* axis_name(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::SubscriberCount: return "SUBSCRIBER_COUNT";
    case SweepAxis::BucketMultiplier: return "BUCKET_MULTIPLIER";
    default: return "NONE";
    }
}

struct PointSpec {
    double value = 0.0;
    uint32_t subscriber_count = 0;
    double bucket_multiplier = 0.0;
};

std::vector<PointSpec> expand_points(const Scenario& scenario) {
    std::vector<PointSpec> points;
    const uint32_t base_count = scenario.rates_bps.empty()
                                    ? scenario.subscriber_count
                                    : static_cast<uint32_t>(scenario.rates_bps.size());
    if (scenario.sweep_axis == SweepAxis::None) {
        points.push_back({static_cast<double>(base_count), base_count,
                          scenario.bucket_multiplier});
    } else if (scenario.sweep_axis == SweepAxis::SubscriberCount) {
        for (double v : scenario.sweep_values)
            points.push_back({v, static_cast<uint32_t>(v), scenario.bucket_multiplier});
    } else {
        for (double v : scenario.sweep_values)
            points.push_back({v, base_count, v});
    }
    return points;
}

RunSettings make_settings(const Scenario& scenario, const PointSpec& point, uint64_t seed,
                          ShapingMode mode) {
    RunSettings settings;
    settings.line_rate_bps = scenario.line_rate_bps;
    settings.peak_rate_bps = scenario.peak_rate_bps;
    settings.mtu_bytes = scenario.mtu_bytes;
    settings.profiles = make_profiles(scenario, point.subscriber_count, point.bucket_multiplier);
    settings.mode = mode;
    settings.policy = scenario.ctbf;
    settings.traffic = scenario.traffic;
    settings.duration_s = scenario.duration_s;
    settings.warmup_s = scenario.warmup_s;
    settings.seed = seed;
    return settings;
}

} // namespace

std::string csv_header() {
    std::string header = "scenario,sweep_axis,sweep_value,seed,subscriber";
    for (const char* prefix : {"tbf_", "ctbf_"})
        for (const char* column : kSummaryColumns) {
            header += ',';
            header += prefix;
            header += column;
        }
    return header;
}

SweepResult run_sweep(const Scenario& scenario, unsigned jobs) {
    const bool run_tbf = scenario.policies != PolicySelection::CtbfOnly;
    const bool run_ctbf = scenario.policies != PolicySelection::TbfOnly;
    const std::vector<PointSpec> points = expand_points(scenario);

    std::vector<RunSettings> tasks;
    struct TaskKey {
        size_t point;
        size_t seed;
        bool ctbf;
    };
    std::vector<TaskKey> keys;
    for (size_t p = 0; p < points.size(); ++p)
        for (size_t s = 0; s < scenario.seeds.size(); ++s) {
            if (run_tbf) {
                tasks.push_back(make_settings(scenario, points[p], scenario.seeds[s],
                                              ShapingMode::Tbf));
                keys.push_back({p, s, false});
            }
            if (run_ctbf) {
                tasks.push_back(make_settings(scenario, points[p], scenario.seeds[s],
                                              ShapingMode::Ctbf));
                keys.push_back({p, s, true});
            }
        }

    const std::vector<RunResult> runs = run_many(tasks, jobs);

    // index results per (point, seed)
    std::vector<const RunResult*> tbf_of(points.size() * scenario.seeds.size(), nullptr);
    std::vector<const RunResult*> ctbf_of(points.size() * scenario.seeds.size(), nullptr);
    SweepResult result;
    for (size_t i = 0; i < runs.size(); ++i) {
        const size_t cell = keys[i].point * scenario.seeds.size() + keys[i].seed;
        (keys[i].ctbf ? ctbf_of : tbf_of)[cell] = &runs[i];
        result.diagnostics.push_back({points[keys[i].point].value, scenario.seeds[keys[i].seed],
                                      keys[i].ctbf ? ShapingMode::Ctbf : ShapingMode::Tbf,
                                      runs[i].events_executed, runs[i].validation});
        result.all_valid = result.all_valid && runs[i].validation.ok();
        result.total_events += runs[i].events_executed;
    }

    std::string csv = csv_header();
    csv += '\n';
    for (size_t p = 0; p < points.size(); ++p) {
        for (size_t s = 0; s < scenario.seeds.size(); ++s) {
            const size_t cell = p * scenario.seeds.size() + s;
            const RunResult* tbf = tbf_of[cell];
            const RunResult* ctbf = ctbf_of[cell];
            const size_t subscribers = points[p].subscriber_count;
            for (size_t sub = 0; sub <= subscribers; ++sub) {
                const bool aggregate = sub == subscribers;
                csv += scenario.name;
                csv += ',';
                csv += axis_name(scenario.sweep_axis);
                csv += ',' + format_double(points[p].value);
                csv += ',' + std::to_string(scenario.seeds[s]);
                csv += ',';
                csv += aggregate ? "ALL" : std::to_string(sub);
                append_summary_cells(
                    csv, tbf ? (aggregate ? &tbf->report.aggregate
                                          : &tbf->report.per_subscriber[sub])
                             : nullptr);
                append_summary_cells(
                    csv, ctbf ? (aggregate ? &ctbf->report.aggregate
                                           : &ctbf->report.per_subscriber[sub])
                              : nullptr);
                csv += '\n';
            }
        }
    }
    result.csv = std::move(csv);
    return result;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

struct ParsedCsv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    size_t column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw std::runtime_error("compare: column '" + name + "' missing from CSV");
    }
};

ParsedCsv parse_csv(const std::string& text) {
    ParsedCsv parsed;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("compare: empty CSV");
    parsed.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto cells = split_csv_line(line);
        cells.resize(parsed.header.size());
        parsed.rows.push_back(std::move(cells));
    }
    return parsed;
}

std::string resolve_policy(const ParsedCsv& csv, const std::string& requested) {
    if (requested == "TBF" || requested == "CTBF")
        return requested;
    if (requested != "auto")
        throw std::runtime_error("compare: policy must be TBF, CTBF or auto");
    const size_t sub_col = csv.column("subscriber");
    const size_t tbf_col = csv.column("tbf_http_samples");
    const size_t ctbf_col = csv.column("ctbf_http_samples");
    bool has_tbf = false, has_ctbf = false;
    for (const auto& row : csv.rows) {
        if (row[sub_col] != "ALL")
            continue;
        has_tbf = has_tbf || !row[tbf_col].empty();
        has_ctbf = has_ctbf || !row[ctbf_col].empty();
    }
    if (has_tbf == has_ctbf)
        throw std::runtime_error(has_tbf
                                     ? "compare: CSV carries both policies; pass an explicit policy"
                                     : "compare: CSV carries no populated policy columns");
    return has_tbf ? "TBF" : "CTBF";
}

// metric name -> sweep value -> mean across seeds, over ALL rows
std::map<std::string, std::map<double, double>> metric_means(const ParsedCsv& csv,
                                                             const std::string& policy) {
    const std::string prefix = policy == "TBF" ? "tbf_" : "ctbf_";
    const char* const metrics[] = {"mean_http_delay_s", "mean_ftp_throughput_bps",
                                   "decodable_frame_rate", "sharing_efficiency"};
    const size_t sub_col = csv.column("subscriber");
    const size_t value_col = csv.column("sweep_value");

    std::map<std::string, std::map<double, double>> means;
    for (const char* metric : metrics) {
        const size_t col = csv.column(prefix + metric);
        std::map<double, std::pair<double, size_t>> acc;
        for (const auto& row : csv.rows) {
            if (row[sub_col] != "ALL" || row[col].empty())
                continue;
            const double value = std::stod(row[value_col]);
            auto& [sum, n] = acc[value];
            sum += std::stod(row[col]);
            ++n;
        }
        for (const auto& [value, pair] : acc)
            means[metric][value] = pair.first / static_cast<double>(pair.second);
    }
    return means;
}

} // namespace

std::vector<CompareRow> compare_csv(const std::string& baseline_csv,
                                    const std::string& candidate_csv,
                                    const std::string& baseline_policy,
                                    const std::string& candidate_policy) {
    const ParsedCsv baseline = parse_csv(baseline_csv);
    const ParsedCsv candidate = parse_csv(candidate_csv);
    const auto base_means = metric_means(baseline, resolve_policy(baseline, baseline_policy));
    const auto cand_means = metric_means(candidate, resolve_policy(candidate, candidate_policy));

    std::vector<CompareRow> rows;
    for (const auto& [metric, by_value] : base_means) {
        auto cand_metric = cand_means.find(metric);
        if (cand_metric == cand_means.end())
            continue;
        for (const auto& [value, base] : by_value) {
            auto cand = cand_metric->second.find(value);
            if (cand == cand_metric->second.end())
                continue;
            CompareRow row;
            row.sweep_value = value;
            row.metric = metric;
            row.baseline = base;
            row.candidate = cand->second;
            row.ratio = base != 0.0 ? cand->second / base
                                    : std::numeric_limits<double>::quiet_NaN();
            rows.push_back(row);
        }
    }
    return rows;
}

std::string format_compare(const std::vector<CompareRow>& rows) {
    std::string out = "sweep_value,metric,baseline,candidate,ratio\n";
    for (const auto& row : rows) {
        out += format_double(row.sweep_value);
        out += ',' + row.metric;
        out += ',' + format_double(row.baseline);
        out += ',' + format_double(row.candidate);
        out += ',' + format_double(row.ratio);
        out += '\n';
    }
    return out;
}

} // namespace ctbf

#include "ctbf/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "ctbf/event_queue.hpp"

namespace ctbf {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

struct UnitState {
    FlowTag kind = FlowTag::Http;
    SubscriberId sub = 0;
    uint32_t user = 0;
    double start_at = 0.0;
    uint64_t total = 0;
    uint64_t remaining = 0;
    size_t frame_slot = SIZE_MAX;
};

struct FrameRecord {
    SubscriberId sub = 0;
    double deadline = 0.0;
    double completed_at = kNever;
};

struct VideoSourceState {
    RandomStream rng;
    std::vector<VideoFrame> trace;   // loaded once when a trace file is configured
    std::vector<VideoFrame> frames;  // current session's schedule
    size_t next_frame = 0;
    double session_start = 0.0;
    explicit VideoSourceState(RandomStream r) : rng(std::move(r)) {}
};

class Simulation {
public:
    explicit Simulation(const RunSettings& settings)
        : settings_(settings),
          metrics_(settings.profiles.size(), settings.warmup_s),
          switch_(make_switch_config(settings), events_, metrics_) {
        switch_.set_delivery_callback(
            [this](const Packet& packet, double at) { on_delivered(packet, at); });
        switch_.enable_departure_log(settings.record_departures);
        if (settings_.record_draws)
            draws_.per_subscriber.resize(settings_.profiles.size());
    }

    RunResult run() {
        start_sources();
        events_.run_until(settings_.duration_s);
        switch_.settle_all(settings_.duration_s);
        flush_frame_verdicts();

        RunResult result;
        result.report = metrics_.summarize();
        result.events_executed = events_.executed();
        result.departures = switch_.departures();
        result.draws = std::move(draws_);
        result.validation = validate(result.report);
        return result;
    }

private:
    static SwitchConfig make_switch_config(const RunSettings& settings) {
        SwitchConfig config;
        config.line_rate_bps = settings.line_rate_bps;
        config.peak_rate_bps = settings.peak_rate_bps;
        config.mtu_bytes = settings.mtu_bytes;
        config.mode = settings.mode;
        config.policy = settings.policy;
        config.profiles = settings.profiles;
        return config;
    }

    void record_draw(SubscriberId sub, StreamKind kind, double value) {
        if (!settings_.record_draws)
            return;
        draws_.per_subscriber[sub][static_cast<size_t>(kind) - 1].push_back(value);
    }

    void start_sources() {
        const size_t n = settings_.profiles.size();
        for (SubscriberId sub = 0; sub < n; ++sub) {
            for (uint32_t user = 0; user < settings_.traffic.users_per_subscriber; ++user) {
                if (settings_.traffic.http.enabled) {
                    http_rngs_.emplace_back(settings_.seed, sub, StreamKind::HttpSource, user);
                    schedule_http(sub, user, http_rngs_.size() - 1, 0.0);
                }
                if (settings_.traffic.ftp.enabled) {
                    ftp_rngs_.emplace_back(settings_.seed, sub, StreamKind::FtpSource, user);
                    schedule_ftp(sub, user, ftp_rngs_.size() - 1, 0.0);
                }
                if (settings_.traffic.video.enabled) {
                    video_states_.emplace_back(
                        RandomStream(settings_.seed, sub, StreamKind::VideoSource, user));
                    schedule_video_session(sub, user, video_states_.size() - 1, 0.0);
                }
            }
        }
    }

    // --- units -----------------------------------------------------------

    uint64_t open_unit(FlowTag kind, SubscriberId sub, uint32_t user, double start_at,
                       uint64_t bytes, size_t frame_slot = SIZE_MAX) {
        const uint64_t id = next_unit_++;
        units_.emplace(id, UnitState{kind, sub, user, start_at, bytes, bytes, frame_slot});
        return id;
    }

    void enqueue_unit(uint64_t unit, FlowTag kind, SubscriberId sub, uint64_t bytes, double now) {
        const uint32_t mtu = settings_.mtu_bytes;
        while (bytes > 0) {
            const uint32_t len = bytes > mtu ? mtu : static_cast<uint32_t>(bytes);
            switch_.ingress(Packet{len, sub, kind, now, unit});
            bytes -= len;
        }
    }

    void on_delivered(const Packet& packet, double at) {
        auto it = units_.find(packet.unit);
        if (it == units_.end())
            throw std::logic_error("simulation: delivery for unknown unit");
        UnitState& unit = it->second;
        unit.remaining -= packet.length;
        if (unit.remaining > 0)
            return;

        switch (unit.kind) {
        case FlowTag::Http:
            metrics_.record_http(unit.sub, unit.start_at, at);
            schedule_http(unit.sub, unit.user, source_slot(unit.sub, unit.user), at);
            break;
        case FlowTag::Ftp:
            metrics_.record_ftp(unit.sub, unit.start_at, at, unit.total);
            schedule_ftp(unit.sub, unit.user, source_slot(unit.sub, unit.user), at);
            break;
        case FlowTag::Video:
            frame_log_[unit.frame_slot].completed_at = at;
            break;
        }
        units_.erase(it);
    }

    size_t source_slot(SubscriberId sub, uint32_t user) const {
        return static_cast<size_t>(sub) * settings_.traffic.users_per_subscriber + user;
    }

    // --- web browsing ------------------------------------------------------

    void schedule_http(SubscriberId sub, uint32_t user, size_t slot, double base) {
        const HttpCycle cycle = next_http_cycle(http_rngs_[slot], settings_.traffic.http);
        record_draw(sub, StreamKind::HttpSource, cycle.think_s);
        record_draw(sub, StreamKind::HttpSource, static_cast<double>(cycle.response_bytes));
        const double request_at = base + cycle.think_s;
        if (request_at > settings_.duration_s)
            return;
        events_.schedule(request_at, [this, sub, user, bytes = cycle.response_bytes] {
            const double now = events_.now();
            const uint64_t unit = open_unit(FlowTag::Http, sub, user, now, bytes);
            // the page is fetched as objects_per_page separate objects, all
            // requested together; the delay sample still ends at the last byte
            const uint64_t objects =
                std::max<uint64_t>(1, std::min<uint64_t>(settings_.traffic.http.objects_per_page,
                                                         bytes));
            uint64_t left = bytes;
            for (uint64_t o = 0; o < objects; ++o) {
                const uint64_t share = left / (objects - o);
                enqueue_unit(unit, FlowTag::Http, sub, share, now);
                left -= share;
            }
        });
    }

    // --- bulk transfer ------------------------------------------------------

    void schedule_ftp(SubscriberId sub, uint32_t user, size_t slot, double base) {
        const FtpSession session = next_ftp_session(ftp_rngs_[slot], settings_.traffic.ftp);
        record_draw(sub, StreamKind::FtpSource, session.gap_s);
        const double start_at = base + session.gap_s;
        if (start_at > settings_.duration_s)
            return;
        events_.schedule(start_at, [this, sub, user, bytes = session.file_bytes] {
            const double now = events_.now();
            const uint64_t unit = open_unit(FlowTag::Ftp, sub, user, now, bytes);
            enqueue_unit(unit, FlowTag::Ftp, sub, bytes, now);
        });
    }

    // --- streaming ------------------------------------------------------

    void schedule_video_session(SubscriberId sub, uint32_t user, size_t slot, double base) {
        VideoSourceState& state = video_states_[slot];
        const double gap = state.rng.exponential(settings_.traffic.video.gap_mean_s);
        record_draw(sub, StreamKind::VideoSource, gap);
        const double session_start = base + gap;
        if (session_start > settings_.duration_s)
            return;
        events_.schedule(session_start,
                         [this, sub, user, slot] { start_video_session(sub, user, slot); });
    }

    void start_video_session(SubscriberId sub, uint32_t user, size_t slot) {
        VideoSourceState& state = video_states_[slot];
        const VideoModelParams& params = settings_.traffic.video;
        if (!params.trace_file.empty()) {
            if (state.trace.empty())
                state.trace = video_frames_from_trace(params.trace_file, params.fps);
            state.frames = state.trace;
        } else {
            state.frames = video_frames(state.rng, params);
            for (const VideoFrame& f : state.frames)
                record_draw(sub, StreamKind::VideoSource, static_cast<double>(f.size_bytes));
        }
        state.next_frame = 0;
        state.session_start = events_.now();
        emit_video_frame(sub, user, slot);
    }

    void emit_video_frame(SubscriberId sub, uint32_t user, size_t slot) {
        VideoSourceState& state = video_states_[slot];
        const VideoFrame& frame = state.frames[state.next_frame];
        const double now = events_.now();

        frame_log_.push_back({sub, state.session_start + frame.deadline_offset_s, kNever});
        const uint64_t unit = open_unit(FlowTag::Video, sub, user, now, frame.size_bytes,
                                        frame_log_.size() - 1);
        enqueue_unit(unit, FlowTag::Video, sub, frame.size_bytes, now);

        ++state.next_frame;
        if (state.next_frame < state.frames.size()) {
            const double at =
                state.session_start + state.frames[state.next_frame].emit_offset_s;
            if (at <= settings_.duration_s)
                events_.schedule(at, [this, sub, user, slot] { emit_video_frame(sub, user, slot); });
            return;
        }
        // session emitted completely; the next one starts after the nominal
        // play length plus an idle gap
        const double nominal_end =
            state.session_start +
            static_cast<double>(state.frames.size()) / settings_.traffic.video.fps;
        schedule_video_session(sub, user, slot, nominal_end);
    }

    void flush_frame_verdicts() {
        for (const FrameRecord& frame : frame_log_)
            if (frame.deadline <= settings_.duration_s)
                metrics_.record_frame(frame.sub, frame.deadline, frame.completed_at);
    }

    // --- post-run checks ------------------------------------------------

    ValidationReport validate(const MetricsReport& report) const {
        ValidationReport v;
        if (const CtbfController* controller = switch_.controller()) {
            v.rate_recomputations = controller->stats().recomputations;
            v.max_conservation_rel_error = controller->stats().max_conservation_rel_error;
            v.conservation_ok = v.max_conservation_rel_error <= 1e-9;
        }

        double sum_assigned = 0.0;
        for (const auto& p : settings_.profiles)
            sum_assigned += p.assigned_rate_bps;
        v.delivered_bits = static_cast<double>(report.aggregate.delivered_bytes) * 8.0;
        v.delivered_bound_bits = sum_assigned * settings_.duration_s +
                                 report.aggregate.initial_tokens * 8.0 +
                                 static_cast<double>(settings_.profiles.size()) *
                                     static_cast<double>(settings_.mtu_bytes) * 8.0;
        v.delivered_bound_ok = v.delivered_bits <= v.delivered_bound_bits + 1e-6;

        for (const auto& sub : report.per_subscriber) {
            const double residual =
                std::abs(sub.tokens_generated + sub.initial_tokens -
                         static_cast<double>(sub.consumed_bytes) - sub.tokens_discarded -
                         sub.final_tokens);
            v.max_token_closure_error_bytes =
                std::max(v.max_token_closure_error_bytes, residual);
            const double tolerance =
                std::max(1.0, 1e-9 * (sub.tokens_generated + sub.initial_tokens));
            if (residual > tolerance)
                v.token_closure_ok = false;
        }
        return v;
    }

    RunSettings settings_;
    EventQueue events_;
    MetricsCollector metrics_;
    AccessSwitch switch_;

    std::vector<RandomStream> http_rngs_;
    std::vector<RandomStream> ftp_rngs_;
    std::vector<VideoSourceState> video_states_;

    std::unordered_map<uint64_t, UnitState> units_;
    uint64_t next_unit_ = 1;
    std::vector<FrameRecord> frame_log_;
    WorkloadDraws draws_;
};

} // namespace

RunResult run_simulation(const RunSettings& settings) {
    Simulation sim(settings);
    return sim.run();
}

} // namespace ctbf

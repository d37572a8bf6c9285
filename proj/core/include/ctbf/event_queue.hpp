#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_set>
#include <vector>

namespace ctbf {

/// Deterministic discrete-event kernel. Events fire in (time, scheduling
/// order); equal-time events fire in the order they were scheduled. The
/// clock never moves backwards. Cancellation is lazy: cancelled entries are
/// skipped when they surface.
class EventQueue {
public:
    using Handle = uint64_t;
    static constexpr Handle kNoHandle = 0;

    double now() const { return now_; }
    uint64_t executed() const { return executed_; }

    /// Schedule `action` at `fire_at` (>= now). Throws on scheduling in the past.
    Handle schedule(double fire_at, std::function<void()> action);

    /// Cancel a not-yet-fired event. Valid only for pending handles.
    void cancel(Handle handle);

    /// Execute every event with fire_at <= horizon, then advance the clock to
    /// the horizon. Returns the number of events executed by this call.
    uint64_t run_until(double horizon);

private:
    struct Entry {
        double fire_at;
        Handle handle;
        std::function<void()> action;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.fire_at != b.fire_at)
                return a.fire_at > b.fire_at;
            return a.handle > b.handle;
        }
    };

    double now_ = 0.0;
    Handle next_handle_ = 1;
    uint64_t executed_ = 0;
    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    std::unordered_set<Handle> cancelled_;
};

} // namespace ctbf

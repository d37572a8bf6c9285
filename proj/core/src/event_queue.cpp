#include "ctbf/event_queue.hpp"

#include <stdexcept>
#include <utility>

namespace ctbf {

EventQueue::Handle EventQueue::schedule(double fire_at, std::function<void()> action) {
    if (fire_at < now_)
        throw std::logic_error("event queue: scheduling in the past");
    const Handle handle = next_handle_++;
    heap_.push(Entry{fire_at, handle, std::move(action)});
    return handle;
}

void EventQueue::cancel(Handle handle) {
    if (handle != kNoHandle)
        cancelled_.insert(handle);
}

uint64_t EventQueue::run_until(double horizon) {
    uint64_t count = 0;
    while (!heap_.empty() && heap_.top().fire_at <= horizon) {
        Entry entry = heap_.top();
        heap_.pop();
        if (cancelled_.erase(entry.handle) > 0)
            continue;
        now_ = entry.fire_at;
        entry.action();
        ++count;
    }
    if (horizon > now_)
        now_ = horizon;
    executed_ += count;
    return count;
}

} // namespace ctbf

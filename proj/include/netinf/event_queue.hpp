#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "netinf/errors.hpp"
#include "netinf/trace.hpp"

namespace netinf {

using EventHandler = std::function<void()>;

// Deterministic discrete-event queue. Events are processed in strictly
// ascending (time, seq) order; seq is assigned at scheduling time, so
// same-time events run FIFO. Each processed event writes one trace row.
class EventQueue {
public:
    explicit EventQueue(Trace& trace) : trace_(trace) {}

    double now() const { return clock_; }
    bool empty() const { return queue_.empty(); }
    std::uint64_t scheduled_total() const { return next_seq_; }

    // Enqueues an event; returns its seq as the event id. `node` and `detail`
    // go into the trace row written when the event is processed. Throws
    // SchedulingError if time is in the past.
    std::uint64_t schedule(const std::string& kind, const std::string& node,
                           const std::string& detail, double time, EventHandler fn);

    // Processes every event with time <= t_end. The clock ends at t_end
    // unless this call drained a non-empty queue, in which case it stops at
    // the last processed event's time.
    std::size_t run_until(double t_end);

    // Drains the queue completely; the clock ends at the last event's time.
    std::size_t run_all();

private:
    struct Scheduled {
        double time;
        std::uint64_t seq;
        std::string kind;
        std::string node;
        std::string detail;
        EventHandler fn;
    };
    struct Later {
        bool operator()(const Scheduled& a, const Scheduled& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    void process_one();

    Trace& trace_;
    double clock_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::priority_queue<Scheduled, std::vector<Scheduled>, Later> queue_;
};

} // namespace netinf

#include "netinf/event_queue.hpp"

#include <sstream>
#include <utility>

namespace netinf {

std::uint64_t EventQueue::schedule(const std::string& kind, const std::string& node,
                                   const std::string& detail, double time, EventHandler fn) {
    if (time < clock_) {
        std::ostringstream os;
        os << "schedule(" << kind << "): time " << time << " is before current clock " << clock_;
        throw SchedulingError(os.str());
    }
    std::uint64_t seq = next_seq_++;
    queue_.push(Scheduled{time, seq, kind, node, detail, std::move(fn)});
    return seq;
}

void EventQueue::process_one() {
    // priority_queue::top returns const&; move out via const_cast is not
    // worth it here, events are small.
    Scheduled ev = queue_.top();
    queue_.pop();
    clock_ = ev.time;
    trace_.append(ev.time, ev.node.empty() ? "-" : ev.node, ev.kind, ev.detail);
    if (ev.fn) ev.fn();
}

std::size_t EventQueue::run_until(double t_end) {
    if (t_end < clock_) {
        std::ostringstream os;
        os << "run_until(" << t_end << "): target is before current clock " << clock_;
        throw SchedulingError(os.str());
    }
    bool had_events = !queue_.empty();
    std::size_t processed = 0;
    while (!queue_.empty() && queue_.top().time <= t_end) {
        process_one();
        ++processed;
    }
    if (!(had_events && queue_.empty() && processed > 0)) {
        clock_ = t_end;
    }
    return processed;
}

std::size_t EventQueue::run_all() {
    std::size_t processed = 0;
    while (!queue_.empty()) {
        process_one();
        ++processed;
    }
    return processed;
}

} // namespace netinf

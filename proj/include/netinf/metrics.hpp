#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "netinf/trace.hpp"

namespace netinf {

struct SessionMetrics {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t lost = 0;
    std::uint64_t expired = 0;
    std::uint64_t in_flight = 0;  // no terminal row by the horizon
    double max_gap_s = 0.0;
    double interruption_time_s = 0.0;
};

struct NodeMetrics {
    std::vector<double> handover_latency_s;
    std::uint64_t signaling_msgs = 0;
    double energy_units = 0.0;
};

struct Metrics {
    std::map<std::string, SessionMetrics> sessions;
    std::map<std::string, NodeMetrics> nodes;
    std::vector<double> lookup_latency_samples_s;
    std::uint64_t proxy_search_failures = 0;
    std::uint64_t trace_rows = 0;
};

// Derives all metrics from the trace alone, so the emitted CSV can be
// re-analyzed offline. Packet accounting relies on packet_send /
// packet_deliver / packet_lost / packet_expired rows; handover latency pairs
// each ho_trigger row with the node's next reg_confirm row; interruption
// sums (gap - interval) over delivery gaps exceeding the session's
// gap threshold (both announced in the session_start row).
Metrics compute_metrics(const Trace& trace);

std::string metrics_to_json(const Metrics& metrics);

} // namespace netinf

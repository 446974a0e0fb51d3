#include "netinf/metrics.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "netinf/errors.hpp"

namespace netinf {

namespace {

// Signaling row kinds counted per node.
const std::set<std::string>& signaling_kinds() {
    static const std::set<std::string> kinds{
        "register",        "reg_confirm",    "register_duplicate", "depart",
        "release",         "location_update", "proxy_search",      "proxy_validation",
        "proxy_validated", "proxy_denied",   "proxy_terminated",   "probe",
        "probe_fail",
    };
    return kinds;
}

struct SessionInfo {
    double interval_s = 0.0;
    double gap_threshold_s = 0.0;
    std::vector<double> deliveries;
};

} // namespace

Metrics compute_metrics(const Trace& trace) {
    Metrics m;
    m.trace_rows = trace.size();

    std::map<std::string, SessionInfo> info;
    // pkt id -> 0 sent only, 1 delivered, 2 lost, 3 expired
    std::map<std::string, int> packet_state;
    std::map<std::string, std::string> packet_session;
    std::map<std::string, double> pending_trigger;  // node -> ho_trigger time

    for (const auto& row : trace.rows()) {
        auto detail = parse_detail(row.detail);
        auto field = [&](const char* key) -> std::string {
            auto it = detail.find(key);
            return it == detail.end() ? std::string() : it->second;
        };

        if (row.node != "-" && !row.node.empty()) {
            auto& nm = m.nodes[row.node];
            if (signaling_kinds().count(row.kind)) ++nm.signaling_msgs;
            auto e = detail.find("energy");
            if (e != detail.end()) nm.energy_units += std::stod(e->second);
        }

        if (row.kind == "session_start") {
            auto& s = info[field("session")];
            if (!field("interval").empty()) s.interval_s = std::stod(field("interval"));
            if (!field("gap_threshold").empty()) {
                s.gap_threshold_s = std::stod(field("gap_threshold"));
            }
        } else if (row.kind == "packet_send") {
            const std::string pkt = field("pkt");
            const std::string session = field("session");
            if (pkt.empty() || session.empty()) {
                throw SimError("packet_send row missing pkt/session: " + row.detail);
            }
            ++m.sessions[session].sent;
            packet_state[pkt] = 0;
            packet_session[pkt] = session;
        } else if (row.kind == "packet_deliver" || row.kind == "packet_lost" ||
                   row.kind == "packet_expired") {
            const std::string pkt = field("pkt");
            auto it = packet_state.find(pkt);
            if (it == packet_state.end()) {
                throw SimError(row.kind + " row for unknown packet: " + row.detail);
            }
            if (it->second != 0) {
                throw SimError("packet " + pkt + " reached two terminal states");
            }
            const std::string& session = packet_session[pkt];
            if (row.kind == "packet_deliver") {
                it->second = 1;
                ++m.sessions[session].delivered;
                info[session].deliveries.push_back(row.time);
            } else if (row.kind == "packet_lost") {
                it->second = 2;
                ++m.sessions[session].lost;
            } else {
                it->second = 3;
                ++m.sessions[session].expired;
            }
        } else if (row.kind == "ho_trigger") {
            pending_trigger[row.node] = row.time;
        } else if (row.kind == "reg_confirm") {
            auto t = pending_trigger.find(row.node);
            if (t != pending_trigger.end()) {
                m.nodes[row.node].handover_latency_s.push_back(row.time - t->second);
                pending_trigger.erase(t);
            }
        } else if (row.kind == "resolve") {
            auto lat = detail.find("latency");
            if (lat != detail.end()) {
                m.lookup_latency_samples_s.push_back(std::stod(lat->second));
            }
        } else if (row.kind == "proxy_search") {
            if (field("found") == "none") ++m.proxy_search_failures;
        }
    }

    for (const auto& [pkt, state] : packet_state) {
        if (state == 0) ++m.sessions[packet_session.at(pkt)].in_flight;
    }

    for (auto& [sid, sm] : m.sessions) {
        auto it = info.find(sid);
        if (it == info.end()) continue;
        auto& deliveries = it->second.deliveries;
        std::sort(deliveries.begin(), deliveries.end());
        double threshold = it->second.gap_threshold_s;
        double interval = it->second.interval_s;
        for (std::size_t i = 1; i < deliveries.size(); ++i) {
            double gap = deliveries[i] - deliveries[i - 1];
            sm.max_gap_s = std::max(sm.max_gap_s, gap);
            if (threshold > 0.0 && gap > threshold) {
                sm.interruption_time_s += gap - interval;
            }
        }
    }
    return m;
}

std::string metrics_to_json(const Metrics& m) {
    nlohmann::ordered_json j;
    j["sessions"] = nlohmann::ordered_json::object();
    for (const auto& [sid, sm] : m.sessions) {
        nlohmann::ordered_json s;
        s["sent"] = sm.sent;
        s["delivered"] = sm.delivered;
        s["lost"] = sm.lost;
        s["expired"] = sm.expired;
        s["in_flight"] = sm.in_flight;
        s["max_gap_s"] = sm.max_gap_s;
        s["interruption_time_s"] = sm.interruption_time_s;
        j["sessions"][sid] = s;
    }
    j["nodes"] = nlohmann::ordered_json::object();
    for (const auto& [nid, nm] : m.nodes) {
        nlohmann::ordered_json n;
        n["handover_latency_s"] = nm.handover_latency_s;
        n["signaling_msgs"] = nm.signaling_msgs;
        n["energy_units"] = nm.energy_units;
        j["nodes"][nid] = n;
    }
    j["global"]["lookup_latency_samples_s"] = m.lookup_latency_samples_s;
    j["global"]["proxy_search_failures"] = m.proxy_search_failures;
    j["global"]["trace_rows"] = m.trace_rows;
    return j.dump(2) + "\n";
}

} // namespace netinf

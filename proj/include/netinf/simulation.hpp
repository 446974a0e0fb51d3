#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "netinf/ccu.hpp"
#include "netinf/event_queue.hpp"
#include "netinf/geometry.hpp"
#include "netinf/metrics.hpp"
#include "netinf/mobility.hpp"
#include "netinf/name_resolution.hpp"
#include "netinf/random.hpp"
#include "netinf/scenario.hpp"
#include "netinf/trace.hpp"
#include "netinf/vnl.hpp"

namespace netinf {

struct RunResult {
    Trace trace;
    Metrics metrics;
    std::size_t processed_events = 0;
};

// Builds the world from a scenario and runs the event loop to the horizon.
// Single-threaded; one instance per run. Identical (scenario, seed) pairs
// produce byte-identical traces.
class Simulation {
public:
    Simulation(Scenario scenario, std::optional<std::uint64_t> seed_override);
    RunResult run();

private:
    struct SimCell {
        CellSpec spec;
        Cell cell;
        std::unique_ptr<Ccu> ccu;
        std::string access_node;
    };

    struct SimNode {
        NodeSpec spec;
        Point pos;
        std::optional<ScriptedTrajectory> script;
        RandomWaypointState rwp;
        HandoverState fsm{DetachedRelay{std::nullopt}};
        std::optional<std::string> attached_cell;
        std::optional<std::string> last_serving_cell;
        std::optional<std::string> proxy;           // validated proxy (as client)
        std::optional<std::string> current_vmp;     // VMP of the serving cell
        std::optional<std::string> last_vmp_this_attachment;
        std::set<std::string> inside_cells;
        std::set<std::string> inside_vmps;
        std::set<std::string> weak_fired_bs;        // per detachment episode
        std::unique_ptr<DtnBuffer> buffer;
        std::deque<PositionSample> history;
        double battery = 0.0;
        double last_search_t = -1.0;
        bool retry_scheduled = false;
        bool registration_pending = false;          // no-VNL reattach in flight
        bool vmp_exit_outward = false;              // set by geometry, consumed same tick
    };

    struct PacketInfo {
        std::string session;
        std::string src;
        std::string dst;
        int hops = 0;
    };

    // Where a packet currently sits while being forwarded.
    struct Hop {
        enum Kind { AtEndpoint, AtCore, AtBs, AtRelay } kind;
        std::string id;  // endpoint/cell/relay id
    };

    // --- setup ---
    void build_world();
    void setup_resolution();
    void initial_attach();
    void schedule_ticks();
    void schedule_sessions();
    void schedule_paging(const std::string& node_id);

    // --- tick pipeline ---
    void on_tick();
    void update_positions(double t, double dt);
    void geometry_transitions(SimNode& n);
    void evaluate_vnl_node(SimNode& n);
    void evaluate_plain_node(SimNode& n);
    void flush_buffers(SimNode& n);

    // --- VNL machinery ---
    bool vnl_capable(const SimNode& n) const;
    bool proxy_eligible(const SimNode& n) const;
    void dispatch(SimNode& n, const HandoverEvent& ev);
    void apply_action(SimNode& n, const Action& action);
    void start_proxy_search(SimNode& n);
    void complete_validation(const std::string& node_id, const std::string& proxy_id);
    void schedule_retry(SimNode& n);
    void do_release(SimNode& n, const std::string& cell_id);
    void do_register(SimNode& n, const std::string& cell_id);
    void on_registration_confirmed(SimNode& n, const std::string& cell_id);
    void try_auto_agent_deploy(SimNode& n);

    // --- radio ---
    double measured_rss(const SimNode& n, const SimCell& c);
    std::optional<double> node_speed(const SimNode& n) const;
    double predicted_trigger_threshold(SimNode& n, const SimCell& serving);

    // --- packets ---
    void send_session_packet(const SessionSpec& session, std::uint64_t number);
    void forward(const std::string& pkt, const Hop& hop);
    void deliver(const std::string& pkt, const std::string& dst, double latency);
    void lose(const std::string& pkt, const std::string& where, const std::string& reason);
    void buffer_packet(SimNode& holder, const std::string& pkt);
    void reinject(SimNode& holder, const std::vector<BufferedMsg>& msgs,
                  const std::vector<BufferedMsg>& expired);

    // --- resolution ---
    void publish_endpoint(const std::string& id);
    std::string endpoint_locator(const std::string& id) const;
    std::string endpoint_access_node(const std::string& id) const;
    void resolve_for_peers(const std::string& moved_endpoint);
    void update_resolution_on_attach(SimNode& n, const std::string& new_cell);

    bool is_node(const std::string& id) const { return nodes_.count(id) > 0; }
    bool is_correspondent(const std::string& id) const { return correspondents_.count(id) > 0; }
    SimCell& cell(const std::string& id);
    SimNode& node(const std::string& id);

    Scenario sc_;
    Trace trace_;
    EventQueue queue_{trace_};
    RandomStreams rng_;
    MobilityHistory history_;
    ResolutionTree resolution_;
    std::map<std::string, SimCell> cells_;
    std::map<std::string, SimNode> nodes_;
    std::map<std::string, CorrespondentSpec> correspondents_;
    std::map<std::string, PacketInfo> packets_;
    std::map<std::string, std::string> published_access_;  // endpoint -> access node
    AgentManager agents_;
    std::uint64_t tick_index_ = 0;
    double last_tick_t_ = 0.0;
    double horizon_ = 0.0;
};

RunResult run_scenario(const Scenario& scenario,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

} // namespace netinf

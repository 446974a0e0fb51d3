#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netinf/geometry.hpp"
#include "netinf/mobility.hpp"
#include "netinf/name_resolution.hpp"
#include "netinf/vnl.hpp"

namespace netinf {

struct VmpAllocationSpec {
    int count = 4;
    double offset_r1_m = 0.0;
    double radius_r_m = 0.0;
};

struct CellSpec {
    std::string id;
    Point center;
    double radius_m = 0.0;
    RadioParams radio;
    VmpAllocationSpec vmps;
};

enum class TrajectoryKind { Stationary, Waypoints, RandomWaypoint };

struct TrajectorySpec {
    TrajectoryKind kind = TrajectoryKind::Stationary;
    Point start;                      // stationary / random-waypoint start
    std::vector<Waypoint> waypoints;  // scripted
    RandomWaypointConfig region;      // random-waypoint
};

struct NodeSpec {
    std::string id;
    NodeKind kind = NodeKind::Nmn;
    Activity activity = Activity::Active;
    double battery_units = 1000.0;
    bool hosts_agent = false;  // NNMN only: agent preinstalled and active at t=0
    TrajectorySpec trajectory;
};

struct CorrespondentSpec {
    std::string id;
    double core_latency_s = 0.010;
    std::string access_node;  // dictionary access node it resolves through
};

struct SessionSpec {
    std::string id;
    std::string src;  // node or correspondent id
    std::string dst;
    double start_s = 0.0;
    std::optional<double> stop_s;  // default: scenario duration
    double interval_s = 0.05;
    int packet_bytes = 1200;
};

struct LatencySpec {
    double bs_link_s = 0.005;
    double adhoc_link_s = 0.005;
    double registration_s = 0.020;
    double validation_s = 0.020;
    double probe_link_s = 0.008;
    double probe_processing_s = 0.004;
    double agent_migration_s = 0.050;
};

enum class VmpExitMode { Geometric, Rss };

struct Toggles {
    bool vnl_enabled = true;
    bool power_mgmt_enabled = true;
    double shadowing_sigma_db = 0.0;
    double adhoc_range_m = 250.0;
    std::size_t buffer_capacity_msgs = 1024;
    double ttl_s = 1e9;
    VmpExitMode vmp_exit_mode = VmpExitMode::Geometric;
    LatencySpec latencies;
    double trigger_margin_s = 0.5;
    double idle_multiplier = 4.0;
    double paging_base_interval_s = 10.0;
    double battery_floor_units = 10.0;
    double paging_cost_units = 1.0;
    double relay_cost_units = 0.01;
    double default_speed_mps = 1.0;
    double default_handoff_delay_s = 0.05;
    double speed_window_s = 5.0;
    double retry_interval_s = 1.0;
    double weak_detect_offset_db = 6.0;
    std::optional<double> gap_threshold_s;  // default: interval + tick, per session
};

struct AccessNodeSpec {
    std::string id;
    std::string pop;
    std::vector<std::string> cells;  // cells this access node serves
};

struct PopSpec {
    std::string id;
    std::string as_id;
};

struct ResolutionSpec {
    MobilityCase mobility_case = MobilityCase::Terminal;
    double level_latencies_s[4] = {0.002, 0.010, 0.040, 0.120};
    // Empty topology: one access node per cell ("an-<cell>") under a single
    // PoP ("pop1") and AS ("as1").
    std::vector<std::string> ases;
    std::vector<PopSpec> pops;
    std::vector<AccessNodeSpec> access_nodes;
};

struct Scenario {
    std::string name;
    double duration_s = 0.0;
    double tick_s = 0.1;
    std::uint64_t master_seed = 1;
    std::vector<CellSpec> cells;
    std::vector<NodeSpec> nodes;
    std::vector<CorrespondentSpec> correspondents;
    std::vector<SessionSpec> sessions;
    std::vector<std::string> deny_list;
    Toggles toggles;
    ResolutionSpec resolution;
};

// Parses and validates a scenario. Unknown keys, duplicate ids, dangling
// references and geometry violations are errors naming the offending key.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& json_text, const std::string& origin);

} // namespace netinf

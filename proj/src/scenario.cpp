#include "netinf/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "netinf/ccu.hpp"
#include "netinf/errors.hpp"

namespace netinf {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw ScenarioError(where + ": " + msg);
}

void require_keys(const Json& obj, const std::string& where,
                  const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) fail(where, "unknown key '" + it.key() + "'");
    }
    for (const auto& key : required) {
        if (!obj.contains(key)) fail(where, "missing required key '" + key + "'");
    }
}

double get_number(const Json& obj, const std::string& where, const std::string& key) {
    if (!obj.at(key).is_number()) fail(where, "key '" + key + "' must be a number");
    return obj.at(key).get<double>();
}

double get_number_or(const Json& obj, const std::string& where, const std::string& key,
                     double fallback) {
    if (!obj.contains(key)) return fallback;
    return get_number(obj, where, key);
}

std::string get_string(const Json& obj, const std::string& where, const std::string& key) {
    if (!obj.at(key).is_string()) fail(where, "key '" + key + "' must be a string");
    return obj.at(key).get<std::string>();
}

bool get_bool_or(const Json& obj, const std::string& where, const std::string& key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) fail(where, "key '" + key + "' must be a boolean");
    return obj.at(key).get<bool>();
}

Point get_point(const Json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        fail(where, "expected a [x, y] coordinate pair");
    }
    return Point{v[0].get<double>(), v[1].get<double>()};
}

RadioParams parse_radio(const Json& obj, const std::string& where) {
    require_keys(obj, where,
                 {"tx_power_dbm", "ref_distance_m", "ref_pathloss_db", "pathloss_exponent"}, {});
    RadioParams radio;
    radio.tx_power_dbm = get_number_or(obj, where, "tx_power_dbm", radio.tx_power_dbm);
    radio.ref_distance_m = get_number_or(obj, where, "ref_distance_m", radio.ref_distance_m);
    radio.ref_pathloss_db = get_number_or(obj, where, "ref_pathloss_db", radio.ref_pathloss_db);
    radio.pathloss_exponent = get_number_or(obj, where, "pathloss_exponent", radio.pathloss_exponent);
    if (radio.ref_distance_m <= 0.0) fail(where, "ref_distance_m must be positive");
    if (radio.pathloss_exponent < 2.0 || radio.pathloss_exponent > 6.0) {
        fail(where, "pathloss_exponent must lie in [2, 6]");
    }
    return radio;
}

CellSpec parse_cell(const Json& obj, const std::string& where) {
    require_keys(obj, where, {"id", "center", "radius_m", "radio", "vmps"},
                 {"id", "center", "radius_m", "vmps"});
    CellSpec cell;
    cell.id = get_string(obj, where, "id");
    cell.center = get_point(obj.at("center"), where + ".center");
    cell.radius_m = get_number(obj, where, "radius_m");
    if (cell.radius_m <= 0.0) fail(where, "radius_m must be positive");
    if (obj.contains("radio")) cell.radio = parse_radio(obj.at("radio"), where + ".radio");
    const Json& vmps = obj.at("vmps");
    std::string vwhere = where + ".vmps";
    require_keys(vmps, vwhere, {"count", "offset_r1_m", "radius_r_m"},
                 {"offset_r1_m", "radius_r_m"});
    cell.vmps.count = static_cast<int>(get_number_or(vmps, vwhere, "count", 4));
    cell.vmps.offset_r1_m = get_number(vmps, vwhere, "offset_r1_m");
    cell.vmps.radius_r_m = get_number(vmps, vwhere, "radius_r_m");
    return cell;
}

TrajectorySpec parse_trajectory(const Json& obj, const std::string& where) {
    require_keys(obj, where,
                 {"kind", "pos", "points", "region"}, {"kind"});
    TrajectorySpec traj;
    std::string kind = get_string(obj, where, "kind");
    if (kind == "stationary") {
        traj.kind = TrajectoryKind::Stationary;
        if (!obj.contains("pos")) fail(where, "stationary trajectory needs 'pos'");
        traj.start = get_point(obj.at("pos"), where + ".pos");
    } else if (kind == "waypoints") {
        traj.kind = TrajectoryKind::Waypoints;
        if (!obj.contains("points") || !obj.at("points").is_array() || obj.at("points").empty()) {
            fail(where, "waypoints trajectory needs a non-empty 'points' array");
        }
        std::size_t idx = 0;
        for (const auto& p : obj.at("points")) {
            std::string pwhere = where + ".points[" + std::to_string(idx) + "]";
            require_keys(p, pwhere, {"pos", "speed_mps"}, {"pos"});
            Waypoint wp;
            wp.pos = get_point(p.at("pos"), pwhere + ".pos");
            wp.speed_mps = get_number_or(p, pwhere, "speed_mps", 0.0);
            if (idx > 0 && wp.speed_mps <= 0.0) {
                fail(pwhere, "leg speed_mps must be positive");
            }
            traj.waypoints.push_back(wp);
            ++idx;
        }
        traj.start = traj.waypoints.front().pos;
    } else if (kind == "random_waypoint") {
        traj.kind = TrajectoryKind::RandomWaypoint;
        if (!obj.contains("region")) fail(where, "random_waypoint trajectory needs 'region'");
        const Json& r = obj.at("region");
        std::string rwhere = where + ".region";
        require_keys(r, rwhere, {"min", "max", "speed_mps"}, {"min", "max", "speed_mps"});
        Point lo = get_point(r.at("min"), rwhere + ".min");
        Point hi = get_point(r.at("max"), rwhere + ".max");
        if (!r.at("speed_mps").is_array() || r.at("speed_mps").size() != 2) {
            fail(rwhere, "speed_mps must be [min, max]");
        }
        traj.region.min_x = lo.x;
        traj.region.min_y = lo.y;
        traj.region.max_x = hi.x;
        traj.region.max_y = hi.y;
        traj.region.min_speed = r.at("speed_mps")[0].get<double>();
        traj.region.max_speed = r.at("speed_mps")[1].get<double>();
        if (traj.region.min_speed <= 0.0 || traj.region.max_speed < traj.region.min_speed) {
            fail(rwhere, "speed range must satisfy 0 < min <= max");
        }
        if (hi.x < lo.x || hi.y < lo.y) fail(rwhere, "region max must dominate min");
        if (obj.contains("pos")) {
            traj.start = get_point(obj.at("pos"), where + ".pos");
        } else {
            traj.start = Point{(lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0};
        }
    } else {
        fail(where, "unknown trajectory kind '" + kind + "'");
    }
    return traj;
}

NodeSpec parse_node(const Json& obj, const std::string& where) {
    require_keys(obj, where,
                 {"id", "kind", "activity", "battery_units", "hosts_agent", "trajectory"},
                 {"id", "kind", "trajectory"});
    NodeSpec node;
    node.id = get_string(obj, where, "id");
    std::string kind = get_string(obj, where, "kind");
    if (kind == "nmn") {
        node.kind = NodeKind::Nmn;
    } else if (kind == "nnmn") {
        node.kind = NodeKind::Nnmn;
    } else {
        fail(where, "node kind must be 'nmn' or 'nnmn', got '" + kind + "'");
    }
    if (obj.contains("activity")) {
        std::string act = get_string(obj, where, "activity");
        if (act == "active") {
            node.activity = Activity::Active;
        } else if (act == "idle") {
            node.activity = Activity::Idle;
        } else {
            fail(where, "activity must be 'active' or 'idle', got '" + act + "'");
        }
    }
    node.battery_units = get_number_or(obj, where, "battery_units", node.battery_units);
    node.hosts_agent = get_bool_or(obj, where, "hosts_agent", false);
    if (node.hosts_agent && node.kind != NodeKind::Nnmn) {
        fail(where, "hosts_agent applies only to NNMN nodes");
    }
    node.trajectory = parse_trajectory(obj.at("trajectory"), where + ".trajectory");
    return node;
}

LatencySpec parse_latencies(const Json& obj, const std::string& where) {
    require_keys(obj, where,
                 {"bs_link_s", "adhoc_link_s", "registration_s", "validation_s", "probe_link_s",
                  "probe_processing_s", "agent_migration_s"},
                 {});
    LatencySpec lat;
    lat.bs_link_s = get_number_or(obj, where, "bs_link_s", lat.bs_link_s);
    lat.adhoc_link_s = get_number_or(obj, where, "adhoc_link_s", lat.adhoc_link_s);
    lat.registration_s = get_number_or(obj, where, "registration_s", lat.registration_s);
    lat.validation_s = get_number_or(obj, where, "validation_s", lat.validation_s);
    lat.probe_link_s = get_number_or(obj, where, "probe_link_s", lat.probe_link_s);
    lat.probe_processing_s = get_number_or(obj, where, "probe_processing_s", lat.probe_processing_s);
    lat.agent_migration_s = get_number_or(obj, where, "agent_migration_s", lat.agent_migration_s);
    return lat;
}

Toggles parse_toggles(const Json& obj, const std::string& where) {
    require_keys(obj, where,
                 {"vnl_enabled", "power_mgmt_enabled", "shadowing_sigma_db", "adhoc_range_m",
                  "buffer_capacity_msgs", "ttl_s", "vmp_exit_mode", "latencies",
                  "trigger_margin_s", "idle_multiplier", "paging_base_interval_s",
                  "battery_floor_units", "paging_cost_units", "relay_cost_units",
                  "default_speed_mps", "default_handoff_delay_s", "speed_window_s",
                  "retry_interval_s", "weak_detect_offset_db", "gap_threshold_s"},
                 {});
    Toggles t;
    t.vnl_enabled = get_bool_or(obj, where, "vnl_enabled", t.vnl_enabled);
    t.power_mgmt_enabled = get_bool_or(obj, where, "power_mgmt_enabled", t.power_mgmt_enabled);
    t.shadowing_sigma_db = get_number_or(obj, where, "shadowing_sigma_db", t.shadowing_sigma_db);
    t.adhoc_range_m = get_number_or(obj, where, "adhoc_range_m", t.adhoc_range_m);
    t.buffer_capacity_msgs = static_cast<std::size_t>(
        get_number_or(obj, where, "buffer_capacity_msgs", static_cast<double>(t.buffer_capacity_msgs)));
    t.ttl_s = get_number_or(obj, where, "ttl_s", t.ttl_s);
    if (obj.contains("vmp_exit_mode")) {
        std::string mode = get_string(obj, where, "vmp_exit_mode");
        if (mode == "geometric") {
            t.vmp_exit_mode = VmpExitMode::Geometric;
        } else if (mode == "rss") {
            t.vmp_exit_mode = VmpExitMode::Rss;
        } else {
            fail(where, "vmp_exit_mode must be 'geometric' or 'rss', got '" + mode + "'");
        }
    }
    if (obj.contains("latencies")) {
        t.latencies = parse_latencies(obj.at("latencies"), where + ".latencies");
    }
    t.trigger_margin_s = get_number_or(obj, where, "trigger_margin_s", t.trigger_margin_s);
    t.idle_multiplier = get_number_or(obj, where, "idle_multiplier", t.idle_multiplier);
    if (t.idle_multiplier < 1.0) fail(where, "idle_multiplier must be >= 1");
    t.paging_base_interval_s =
        get_number_or(obj, where, "paging_base_interval_s", t.paging_base_interval_s);
    if (t.paging_base_interval_s <= 0.0) fail(where, "paging_base_interval_s must be positive");
    t.battery_floor_units = get_number_or(obj, where, "battery_floor_units", t.battery_floor_units);
    t.paging_cost_units = get_number_or(obj, where, "paging_cost_units", t.paging_cost_units);
    t.relay_cost_units = get_number_or(obj, where, "relay_cost_units", t.relay_cost_units);
    t.default_speed_mps = get_number_or(obj, where, "default_speed_mps", t.default_speed_mps);
    t.default_handoff_delay_s =
        get_number_or(obj, where, "default_handoff_delay_s", t.default_handoff_delay_s);
    t.speed_window_s = get_number_or(obj, where, "speed_window_s", t.speed_window_s);
    t.retry_interval_s = get_number_or(obj, where, "retry_interval_s", t.retry_interval_s);
    t.weak_detect_offset_db =
        get_number_or(obj, where, "weak_detect_offset_db", t.weak_detect_offset_db);
    if (obj.contains("gap_threshold_s")) {
        t.gap_threshold_s = get_number(obj, where, "gap_threshold_s");
    }
    return t;
}

ResolutionSpec parse_resolution(const Json& obj, const std::string& where) {
    require_keys(obj, where, {"mobility_case", "level_latencies_s", "ases", "pops", "access_nodes"},
                 {});
    ResolutionSpec res;
    if (obj.contains("mobility_case")) {
        std::string mc = get_string(obj, where, "mobility_case");
        if (mc == "terminal") {
            res.mobility_case = MobilityCase::Terminal;
        } else if (mc == "network") {
            res.mobility_case = MobilityCase::Network;
        } else {
            fail(where, "mobility_case must be 'terminal' or 'network', got '" + mc + "'");
        }
    }
    if (obj.contains("level_latencies_s")) {
        const Json& lat = obj.at("level_latencies_s");
        if (!lat.is_array() || lat.size() != 4) {
            fail(where, "level_latencies_s must be an array of 4 numbers");
        }
        for (int i = 0; i < 4; ++i) res.level_latencies_s[i] = lat[i].get<double>();
    }
    if (obj.contains("ases")) {
        for (const auto& a : obj.at("ases")) res.ases.push_back(a.get<std::string>());
    }
    if (obj.contains("pops")) {
        std::size_t idx = 0;
        for (const auto& p : obj.at("pops")) {
            std::string pwhere = where + ".pops[" + std::to_string(idx++) + "]";
            require_keys(p, pwhere, {"id", "as"}, {"id", "as"});
            res.pops.push_back(PopSpec{get_string(p, pwhere, "id"), get_string(p, pwhere, "as")});
        }
    }
    if (obj.contains("access_nodes")) {
        std::size_t idx = 0;
        for (const auto& a : obj.at("access_nodes")) {
            std::string awhere = where + ".access_nodes[" + std::to_string(idx++) + "]";
            require_keys(a, awhere, {"id", "pop", "cells"}, {"id", "pop"});
            AccessNodeSpec an;
            an.id = get_string(a, awhere, "id");
            an.pop = get_string(a, awhere, "pop");
            if (a.contains("cells")) {
                for (const auto& c : a.at("cells")) an.cells.push_back(c.get<std::string>());
            }
            res.access_nodes.push_back(an);
        }
    }
    return res;
}

void validate(Scenario& sc) {
    if (sc.duration_s <= 0.0) fail("scenario", "duration_s must be positive");
    if (sc.tick_s <= 0.0) fail("scenario", "tick_s must be positive");

    std::set<std::string> ids;
    auto claim = [&](const std::string& id, const std::string& what) {
        if (id.empty()) fail("scenario", what + " id must be non-empty");
        if (!ids.insert(id).second) fail("scenario", "duplicate id '" + id + "'");
    };
    for (const auto& c : sc.cells) claim(c.id, "cell");
    for (const auto& n : sc.nodes) claim(n.id, "node");
    for (const auto& c : sc.correspondents) claim(c.id, "correspondent");

    std::set<std::string> endpoints;
    for (const auto& n : sc.nodes) endpoints.insert(n.id);
    for (const auto& c : sc.correspondents) endpoints.insert(c.id);
    std::set<std::string> session_ids;
    for (const auto& s : sc.sessions) {
        if (!session_ids.insert(s.id).second) fail("scenario", "duplicate session id '" + s.id + "'");
        if (!endpoints.count(s.src)) fail("scenario.sessions", "unknown src '" + s.src + "'");
        if (!endpoints.count(s.dst)) fail("scenario.sessions", "unknown dst '" + s.dst + "'");
        if (s.interval_s <= 0.0) fail("scenario.sessions", "interval_s must be positive");
        if (s.start_s < 0.0) fail("scenario.sessions", "start_s must be >= 0");
    }

    // VMP geometry is checked here so scenario errors surface at load time.
    for (const auto& c : sc.cells) {
        try {
            validate_vmp_geometry(c.vmps.radius_r_m, c.vmps.offset_r1_m, c.radius_m);
        } catch (const GeometryError& e) {
            fail("scenario.cells('" + c.id + "').vmps", e.what());
        }
        if (c.vmps.count < 1) fail("scenario.cells('" + c.id + "').vmps", "count must be >= 1");
    }

    // Default resolution topology: one access node per cell under pop1/as1.
    if (sc.resolution.access_nodes.empty()) {
        sc.resolution.ases = {"as1"};
        sc.resolution.pops = {PopSpec{"pop1", "as1"}};
        for (const auto& c : sc.cells) {
            sc.resolution.access_nodes.push_back(AccessNodeSpec{"an-" + c.id, "pop1", {c.id}});
        }
    }
    std::set<std::string> cell_ids;
    for (const auto& c : sc.cells) cell_ids.insert(c.id);
    std::set<std::string> covered;
    std::set<std::string> access_ids;
    for (const auto& an : sc.resolution.access_nodes) {
        if (!access_ids.insert(an.id).second) {
            fail("scenario.resolution", "duplicate access node '" + an.id + "'");
        }
        for (const auto& c : an.cells) {
            if (!cell_ids.count(c)) {
                fail("scenario.resolution", "access node '" + an.id + "' names unknown cell '" + c + "'");
            }
            if (!covered.insert(c).second) {
                fail("scenario.resolution", "cell '" + c + "' covered by two access nodes");
            }
        }
    }
    for (const auto& c : sc.cells) {
        if (!covered.count(c.id)) {
            fail("scenario.resolution", "cell '" + c.id + "' has no access node");
        }
    }
    for (const auto& corr : sc.correspondents) {
        if (!corr.access_node.empty() && !access_ids.count(corr.access_node)) {
            fail("scenario.correspondents",
                 "correspondent '" + corr.id + "' names unknown access node '" + corr.access_node + "'");
        }
    }
}

Scenario parse(const Json& root, const std::string& origin) {
    require_keys(root, origin,
                 {"name", "duration_s", "tick_s", "master_seed", "cells", "nodes",
                  "correspondents", "sessions", "deny_list", "toggles", "resolution"},
                 {"duration_s", "cells", "nodes"});
    Scenario sc;
    if (root.contains("name")) sc.name = get_string(root, origin, "name");
    sc.duration_s = get_number(root, origin, "duration_s");
    sc.tick_s = get_number_or(root, origin, "tick_s", sc.tick_s);
    if (root.contains("master_seed")) {
        sc.master_seed = root.at("master_seed").get<std::uint64_t>();
    }
    std::size_t idx = 0;
    for (const auto& c : root.at("cells")) {
        sc.cells.push_back(parse_cell(c, origin + ".cells[" + std::to_string(idx++) + "]"));
    }
    idx = 0;
    for (const auto& n : root.at("nodes")) {
        sc.nodes.push_back(parse_node(n, origin + ".nodes[" + std::to_string(idx++) + "]"));
    }
    if (root.contains("correspondents")) {
        idx = 0;
        for (const auto& c : root.at("correspondents")) {
            std::string cwhere = origin + ".correspondents[" + std::to_string(idx++) + "]";
            require_keys(c, cwhere, {"id", "core_latency_s", "access_node"}, {"id"});
            CorrespondentSpec corr;
            corr.id = get_string(c, cwhere, "id");
            corr.core_latency_s = get_number_or(c, cwhere, "core_latency_s", corr.core_latency_s);
            if (c.contains("access_node")) corr.access_node = get_string(c, cwhere, "access_node");
            sc.correspondents.push_back(corr);
        }
    }
    if (root.contains("sessions")) {
        idx = 0;
        for (const auto& s : root.at("sessions")) {
            std::string swhere = origin + ".sessions[" + std::to_string(idx++) + "]";
            require_keys(s, swhere,
                         {"id", "src", "dst", "start_s", "stop_s", "interval_s", "packet_bytes"},
                         {"id", "src", "dst", "interval_s"});
            SessionSpec sess;
            sess.id = get_string(s, swhere, "id");
            sess.src = get_string(s, swhere, "src");
            sess.dst = get_string(s, swhere, "dst");
            sess.start_s = get_number_or(s, swhere, "start_s", 0.0);
            if (s.contains("stop_s")) sess.stop_s = get_number(s, swhere, "stop_s");
            sess.interval_s = get_number(s, swhere, "interval_s");
            sess.packet_bytes = static_cast<int>(get_number_or(s, swhere, "packet_bytes", 1200));
            sc.sessions.push_back(sess);
        }
    }
    if (root.contains("deny_list")) {
        for (const auto& d : root.at("deny_list")) sc.deny_list.push_back(d.get<std::string>());
    }
    if (root.contains("toggles")) {
        sc.toggles = parse_toggles(root.at("toggles"), origin + ".toggles");
    }
    if (root.contains("resolution")) {
        sc.resolution = parse_resolution(root.at("resolution"), origin + ".resolution");
    }
    validate(sc);
    return sc;
}

} // namespace

Scenario parse_scenario_text(const std::string& json_text, const std::string& origin) {
    Json root;
    try {
        root = Json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError(origin + ": " + e.what());
    }
    return parse(root, origin);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

} // namespace netinf

#include "netinf/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace netinf {

namespace {

std::optional<std::string> serving_bs(const HandoverState& state) {
    if (const auto* s = std::get_if<Attached>(&state)) return s->bs;
    if (const auto* s = std::get_if<HoPrepare>(&state)) return s->bs;
    return std::nullopt;
}

bool needs_proxy_search(const HandoverState& state) {
    if (const auto* s = std::get_if<HoPrepare>(&state)) return !s->validated_proxy;
    if (const auto* s = std::get_if<DetachedRelay>(&state)) return !s->proxy;
    return false;
}

} // namespace

Simulation::Simulation(Scenario scenario, std::optional<std::uint64_t> seed_override)
    : sc_(std::move(scenario)),
      rng_(seed_override.value_or(sc_.master_seed)) {
    build_world();
    setup_resolution();
    initial_attach();
}

Simulation::SimCell& Simulation::cell(const std::string& id) {
    auto it = cells_.find(id);
    if (it == cells_.end()) throw SimError("internal: unknown cell " + id);
    return it->second;
}

Simulation::SimNode& Simulation::node(const std::string& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw SimError("internal: unknown node " + id);
    return it->second;
}

void Simulation::build_world() {
    rng_.register_stream("radio");

    for (const auto& spec : sc_.cells) {
        SimCell sim;
        sim.spec = spec;
        sim.cell.bs_id = spec.id;
        sim.cell.center = spec.center;
        sim.cell.radius_R = spec.radius_m;
        sim.cell.radio = spec.radio;
        sim.cell.rss_min_dbm = threshold_from_radius(spec.radio, spec.radius_m);
        sim.cell.vmps = allocate_vmps(spec.id, spec.center, spec.radius_m, spec.radio,
                                      spec.vmps.count, spec.vmps.offset_r1_m,
                                      spec.vmps.radius_r_m);
        sim.ccu = std::make_unique<Ccu>(spec.id);
        for (const auto& denied : sc_.deny_list) sim.ccu->deny(denied);
        cells_.emplace(spec.id, std::move(sim));
    }

    for (const auto& spec : sc_.nodes) {
        SimNode n;
        n.spec = spec;
        n.battery = spec.battery_units;
        n.buffer = std::make_unique<DtnBuffer>(sc_.toggles.buffer_capacity_msgs);
        switch (spec.trajectory.kind) {
            case TrajectoryKind::Stationary:
                n.pos = spec.trajectory.start;
                break;
            case TrajectoryKind::Waypoints:
                n.script.emplace(spec.trajectory.waypoints);
                n.pos = n.script->position_at(0.0);
                break;
            case TrajectoryKind::RandomWaypoint:
                n.pos = spec.trajectory.start;
                n.rwp.pos = spec.trajectory.start;
                rng_.register_stream("mobility:" + spec.id);
                break;
        }
        if (spec.hosts_agent) {
            agents_.deploy("preset:" + spec.id, spec.id, spec.kind, 0.0);
            agents_.activate("preset:" + spec.id);
        }
        nodes_.emplace(spec.id, std::move(n));
    }

    for (const auto& corr : sc_.correspondents) {
        correspondents_.emplace(corr.id, corr);
    }
}

void Simulation::setup_resolution() {
    ResolutionTree::LevelLatencies lat;
    lat.access_s = sc_.resolution.level_latencies_s[0];
    lat.pop_s = sc_.resolution.level_latencies_s[1];
    lat.as_s = sc_.resolution.level_latencies_s[2];
    lat.global_s = sc_.resolution.level_latencies_s[3];
    resolution_.set_latencies(lat);
    for (const auto& as : sc_.resolution.ases) resolution_.add_as(as);
    for (const auto& pop : sc_.resolution.pops) resolution_.add_pop(pop.id, pop.as_id);
    for (const auto& an : sc_.resolution.access_nodes) {
        resolution_.add_access_node(an.id, an.pop);
        for (const auto& c : an.cells) cell(c).access_node = an.id;
    }
}

void Simulation::initial_attach() {
    for (auto& [id, n] : nodes_) {
        const SimCell* best = nullptr;
        double best_rss = 0.0;
        for (auto& [cid, c] : cells_) {
            double d = distance(n.pos, c.cell.center);
            if (d > c.cell.radius_R) continue;
            double rss = rss_dbm(c.cell.radio, std::max(d, 1e-9));
            if (!best || rss > best_rss) {
                best = &c;
                best_rss = rss;
            }
        }
        if (best) {
            // Bootstrap registration: confirmed instantly at t = 0.
            best->ccu->register_node(id, 0.0);
            history_.on_register(id, best->spec.id);
            trace_.append(0.0, id, "register", Detail().kv("cell", best->spec.id).str());
            trace_.append(0.0, id, "reg_confirm", Detail().kv("cell", best->spec.id).str());
            n.attached_cell = best->spec.id;
            n.last_serving_cell = best->spec.id;
            n.fsm = Attached{best->spec.id, std::nullopt};
        } else {
            n.fsm = DetachedRelay{std::nullopt};
        }
    }
    // Session endpoints are published once the initial attachments are known.
    std::set<std::string> published;
    for (const auto& s : sc_.sessions) {
        for (const auto& ep : {s.src, s.dst}) {
            if (published.insert(ep).second) publish_endpoint(ep);
        }
    }
}

std::string Simulation::endpoint_access_node(const std::string& id) const {
    if (correspondents_.count(id)) {
        const auto& corr = correspondents_.at(id);
        if (!corr.access_node.empty()) return corr.access_node;
        return sc_.resolution.access_nodes.front().id;
    }
    auto it = nodes_.find(id);
    if (it != nodes_.end() && it->second.attached_cell) {
        return cells_.at(*it->second.attached_cell).access_node;
    }
    auto pub = published_access_.find(id);
    if (pub != published_access_.end()) return pub->second;
    return sc_.resolution.access_nodes.front().id;
}

std::string Simulation::endpoint_locator(const std::string& id) const {
    std::string access = endpoint_access_node(id);
    if (select_scheme(sc_.resolution.mobility_case) == ResolutionScheme::Mdht) {
        return "node:" + id;
    }
    // LLC: path locator across the edge networks leading to the host.
    std::string pop;
    std::string as;
    for (const auto& an : sc_.resolution.access_nodes) {
        if (an.id == access) {
            pop = an.pop;
            break;
        }
    }
    for (const auto& p : sc_.resolution.pops) {
        if (p.id == pop) {
            as = p.as_id;
            break;
        }
    }
    return encode_path_locator("CER-" + as, {pop, access, id});
}

void Simulation::publish_endpoint(const std::string& id) {
    std::string access = endpoint_access_node(id);
    published_access_[id] = access;
    std::string oid = "loc:" + id;
    resolution_.publish(oid, endpoint_locator(id), access);
    trace_.append(queue_.now(), id, "publish",
                  Detail().kv("oid", oid).kv("access", access).str());
}

void Simulation::resolve_for_peers(const std::string& moved_endpoint) {
    std::string oid = "loc:" + moved_endpoint;
    for (const auto& s : sc_.sessions) {
        std::string peer;
        if (s.src == moved_endpoint) {
            peer = s.dst;
        } else if (s.dst == moved_endpoint) {
            peer = s.src;
        } else {
            continue;
        }
        auto res = resolution_.resolve(oid, endpoint_access_node(peer));
        trace_.append(queue_.now(), peer, "resolve",
                      Detail()
                          .kv("oid", oid)
                          .kv("latency", res.latency_s)
                          .kv("hit", res.hit_level ? dict_level_name(*res.hit_level) : "miss")
                          .str());
    }
}

void Simulation::update_resolution_on_attach(SimNode& n, const std::string& new_cell) {
    auto pub = published_access_.find(n.spec.id);
    if (pub == published_access_.end()) return;
    std::string new_access = cells_.at(new_cell).access_node;
    if (pub->second == new_access) return;
    std::string oid = "loc:" + n.spec.id;
    std::string old_access = pub->second;
    pub->second = new_access;
    resolution_.update_on_handover(oid, old_access, new_access, endpoint_locator(n.spec.id));
    trace_.append(queue_.now(), n.spec.id, "resolution_update",
                  Detail().kv("oid", oid).kv("from", old_access).kv("to", new_access).str());
    resolve_for_peers(n.spec.id);
}

// ---------------------------------------------------------------------------
// Radio and movement
// ---------------------------------------------------------------------------

double Simulation::measured_rss(const SimNode& n, const SimCell& c) {
    double d = std::max(distance(n.pos, c.cell.center), 1e-9);
    double rss = rss_dbm(c.cell.radio, d);
    if (sc_.toggles.shadowing_sigma_db > 0.0) {
        rss += rng_.normal("radio", sc_.toggles.shadowing_sigma_db);
    }
    return rss;
}

std::optional<double> Simulation::node_speed(const SimNode& n) const {
    std::vector<PositionSample> samples(n.history.begin(), n.history.end());
    return speed_estimate(samples, sc_.toggles.speed_window_s);
}

double Simulation::predicted_trigger_threshold(SimNode& n, const SimCell& serving) {
    if (!n.last_vmp_this_attachment) return -1e9;
    const Vmp* vmp = nullptr;
    for (const auto& v : serving.cell.vmps) {
        if (v.vmp_id == *n.last_vmp_this_attachment) {
            vmp = &v;
            break;
        }
    }
    if (!vmp) return -1e9;
    std::optional<double> avg_delay;
    if (auto pred = history_.predict_next(n.spec.id, serving.spec.id)) {
        avg_delay = serving.ccu->delay_table().average(vmp->vmp_id, pred->cell);
    }
    return predicted_rss_trigger(serving.cell, *vmp, node_speed(n), avg_delay,
                                 sc_.toggles.default_speed_mps,
                                 sc_.toggles.default_handoff_delay_s,
                                 sc_.toggles.trigger_margin_s);
}

void Simulation::update_positions(double t, double dt) {
    for (auto& [id, n] : nodes_) {
        switch (n.spec.trajectory.kind) {
            case TrajectoryKind::Stationary:
                break;
            case TrajectoryKind::Waypoints:
                n.pos = n.script->position_at(t);
                break;
            case TrajectoryKind::RandomWaypoint:
                if (dt > 0.0) {
                    n.rwp = step_random_waypoint(n.rwp, n.spec.trajectory.region, dt, rng_,
                                                 "mobility:" + id);
                    n.pos = n.rwp.pos;
                }
                break;
        }
        n.history.push_back(PositionSample{t, n.pos});
        double keep_from = t - sc_.toggles.speed_window_s - 2.0 * sc_.tick_s;
        while (!n.history.empty() && n.history.front().t < keep_from) n.history.pop_front();
    }
}

void Simulation::geometry_transitions(SimNode& n) {
    double now = queue_.now();
    for (auto& [cid, c] : cells_) {
        bool inside = distance(n.pos, c.cell.center) <= c.cell.radius_R;
        bool was = n.inside_cells.count(cid) > 0;
        if (inside && !was) {
            n.inside_cells.insert(cid);
            trace_.append(now, n.spec.id, "cell_enter", Detail().kv("cell", cid).str());
        } else if (!inside && was) {
            n.inside_cells.erase(cid);
            trace_.append(now, n.spec.id, "cell_exit", Detail().kv("cell", cid).str());
        }
        for (const auto& vmp : c.cell.vmps) {
            bool in = in_vmp(n.pos, vmp);
            bool wasin = n.inside_vmps.count(vmp.vmp_id) > 0;
            if (in && !wasin) {
                n.inside_vmps.insert(vmp.vmp_id);
                trace_.append(now, n.spec.id, "vmp_enter",
                              Detail().kv("vmp", vmp.vmp_id).kv("cell", cid).str());
                if (n.attached_cell == cid) {
                    n.current_vmp = vmp.vmp_id;
                    n.last_vmp_this_attachment = vmp.vmp_id;
                    // Handoff-delay probe, once per VMP visit.
                    for (auto& [ocid, oc] : cells_) {
                        if (ocid == cid) continue;
                        auto sample = probe_handoff_delay_sample(
                            sc_.toggles.latencies.probe_link_s,
                            sc_.toggles.latencies.probe_processing_s);
                        c.ccu->delay_table().add_sample(vmp.vmp_id, ocid, *sample);
                        trace_.append(now, n.spec.id, "probe",
                                      Detail()
                                          .kv("vmp", vmp.vmp_id)
                                          .kv("neighbor", ocid)
                                          .kv("sample", *sample)
                                          .str());
                    }
                }
            } else if (!in && wasin) {
                n.inside_vmps.erase(vmp.vmp_id);
                trace_.append(now, n.spec.id, "vmp_exit",
                              Detail().kv("vmp", vmp.vmp_id).kv("cell", cid).str());
                if (n.current_vmp == vmp.vmp_id) {
                    n.current_vmp.reset();
                    // Out of VMP range only counts when leaving away from the
                    // base station; inward exits stay well covered.
                    if (distance(n.pos, c.cell.center) > vmp.offset_r1) {
                        n.vmp_exit_outward = true;
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// VNL dispatch
// ---------------------------------------------------------------------------

bool Simulation::vnl_capable(const SimNode& n) const {
    if (n.spec.kind == NodeKind::Nmn) return true;
    return agents_.host_has_active_agent(n.spec.id);
}

bool Simulation::proxy_eligible(const SimNode& n) const { return vnl_capable(n); }

void Simulation::dispatch(SimNode& n, const HandoverEvent& ev) {
    FsmResult res = fsm_step(n.fsm, ev);
    bool ignored = res.actions.size() == 1 && res.actions[0].kind == ActionKind::LogIgnored;
    std::string from = handover_state_name(n.fsm);
    n.fsm = res.next;
    n.proxy = state_proxy(n.fsm);
    if (ignored) {
        trace_.append(queue_.now(), n.spec.id, "fsm_ignored",
                      Detail().kv("event", handover_event_name(ev.kind)).kv("state", from).str());
        return;
    }
    trace_.append(queue_.now(), n.spec.id, "fsm",
                  Detail()
                      .kv("event", handover_event_name(ev.kind))
                      .kv("from", from)
                      .kv("to", handover_state_name(n.fsm))
                      .str());
    for (const auto& action : res.actions) apply_action(n, action);
}

void Simulation::apply_action(SimNode& n, const Action& action) {
    switch (action.kind) {
        case ActionKind::StartProxySearch:
            start_proxy_search(n);
            break;
        case ActionKind::ReleaseFromBs1:
            do_release(n, action.arg);
            break;
        case ActionKind::TerminateLink:
            trace_.append(queue_.now(), n.spec.id, "proxy_terminated",
                          Detail().kv("proxy", action.arg).str());
            break;
        case ActionKind::RegisterWithBs:
            do_register(n, action.arg);
            break;
        case ActionKind::BufferLocally:
            trace_.append(queue_.now(), n.spec.id, "dtn_buffering", "");
            break;
        case ActionKind::ScheduleRetrySearch:
            schedule_retry(n);
            break;
        case ActionKind::LogIgnored:
            break;
    }
}

void Simulation::start_proxy_search(SimNode& n) {
    n.last_search_t = queue_.now();
    std::optional<std::string> exclude;
    if (const auto* s = std::get_if<ReProxy>(&n.fsm)) exclude = s->old_proxy;

    std::vector<ProxyCandidate> candidates;
    for (auto& [id, m] : nodes_) {
        if (id == n.spec.id) continue;
        if (exclude && id == *exclude) continue;
        if (!proxy_eligible(m)) continue;
        if (distance(n.pos, m.pos) > sc_.toggles.adhoc_range_m) continue;
        candidates.push_back(ProxyCandidate{id, m.pos});
    }
    auto selected = select_proxy(n.pos, candidates);
    trace_.append(queue_.now(), n.spec.id, "proxy_search",
                  Detail().kv("found", selected ? *selected : "none").str());
    if (!selected) {
        try_auto_agent_deploy(n);
        dispatch(n, HandoverEvent{HandoverEventKind::ProxySearchFailed, ""});
        return;
    }

    // Identity check via the serving (or last serving) CCU; the reply takes
    // the validation latency.
    std::string ccu_cell = n.attached_cell ? *n.attached_cell
                                           : n.last_serving_cell.value_or("");
    bool valid = false;
    if (!ccu_cell.empty()) valid = cell(ccu_cell).ccu->validate_identity(n.spec.id);
    trace_.append(queue_.now(), n.spec.id, "proxy_validation",
                  Detail().kv("proxy", *selected).kv("ccu", ccu_cell.empty() ? "-" : ccu_cell).str());
    std::string node_id = n.spec.id;
    std::string proxy_id = *selected;
    if (valid) {
        queue_.schedule("proxy_validated", node_id, Detail().kv("proxy", proxy_id).str(),
                        queue_.now() + sc_.toggles.latencies.validation_s,
                        [this, node_id, proxy_id] { complete_validation(node_id, proxy_id); });
    } else {
        queue_.schedule("proxy_denied", node_id, Detail().kv("proxy", proxy_id).str(),
                        queue_.now() + sc_.toggles.latencies.validation_s, [this, node_id] {
                            auto& nn = node(node_id);
                            dispatch(nn, HandoverEvent{HandoverEventKind::ProxySearchFailed, ""});
                        });
    }
}

void Simulation::complete_validation(const std::string& node_id, const std::string& proxy_id) {
    auto& n = node(node_id);
    HandoverEventKind kind = n.proxy ? HandoverEventKind::NewProxyValidated
                                     : HandoverEventKind::ProxyValidated;
    dispatch(n, HandoverEvent{kind, proxy_id});
    if (state_proxy(n.fsm) != std::optional<std::string>(proxy_id)) {
        // Validation raced past the need for this link; release it at once.
        trace_.append(queue_.now(), n.spec.id, "proxy_terminated",
                      Detail().kv("proxy", proxy_id).str());
    }
}

void Simulation::schedule_retry(SimNode& n) {
    if (n.retry_scheduled) return;
    n.retry_scheduled = true;
    std::string node_id = n.spec.id;
    queue_.schedule("retry_search", node_id, "", queue_.now() + sc_.toggles.retry_interval_s,
                    [this, node_id] {
                        auto& nn = node(node_id);
                        nn.retry_scheduled = false;
                        if (needs_proxy_search(nn.fsm)) start_proxy_search(nn);
                    });
}

void Simulation::try_auto_agent_deploy(SimNode& n) {
    if (n.spec.kind != NodeKind::Nmn) return;
    if (agents_.host_of(n.spec.id)) return;  // agent already out on a host
    std::vector<ProxyCandidate> targets;
    for (auto& [id, m] : nodes_) {
        if (m.spec.kind != NodeKind::Nnmn) continue;
        if (agents_.host_has_active_agent(id)) continue;
        if (distance(n.pos, m.pos) > sc_.toggles.adhoc_range_m) continue;
        targets.push_back(ProxyCandidate{id, m.pos});
    }
    auto target = select_proxy(n.pos, targets);
    if (!target) return;
    try {
        agents_.deploy(n.spec.id, *target, NodeKind::Nnmn, queue_.now());
    } catch (const SimError&) {
        return;  // host taken by another owner's agent
    }
    trace_.append(queue_.now(), n.spec.id, "agent_deploy", Detail().kv("host", *target).str());
    std::string owner = n.spec.id;
    std::string host = *target;
    queue_.schedule("agent_active", owner, Detail().kv("host", host).str(),
                    queue_.now() + sc_.toggles.latencies.agent_migration_s,
                    [this, owner] { agents_.activate(owner); });
}

void Simulation::do_release(SimNode& n, const std::string& cell_id) {
    auto& c = cell(cell_id);
    auto rec = c.ccu->record_departure(n.spec.id, queue_.now());
    history_.on_departure(n.spec.id, cell_id);
    trace_.append(queue_.now(), n.spec.id, "depart",
                  Detail().kv("cell", cell_id).kv("duration", queue_.now() - rec.t_in).str());
    trace_.append(queue_.now(), n.spec.id, "release", Detail().kv("cell", cell_id).str());
    n.attached_cell.reset();
    n.last_serving_cell = cell_id;
    n.current_vmp.reset();
    n.weak_fired_bs.clear();
}

void Simulation::do_register(SimNode& n, const std::string& cell_id) {
    auto& c = cell(cell_id);
    bool duplicate = c.ccu->is_registered(n.spec.id);
    c.ccu->register_node(n.spec.id, queue_.now());
    if (duplicate) {
        trace_.append(queue_.now(), n.spec.id, "register_duplicate",
                      Detail().kv("cell", cell_id).str());
        return;
    }
    history_.on_register(n.spec.id, cell_id);
    trace_.append(queue_.now(), n.spec.id, "register", Detail().kv("cell", cell_id).str());
    std::string node_id = n.spec.id;
    queue_.schedule("reg_confirm", node_id, Detail().kv("cell", cell_id).str(),
                    queue_.now() + sc_.toggles.latencies.registration_s,
                    [this, node_id, cell_id] {
                        on_registration_confirmed(node(node_id), cell_id);
                    });
}

void Simulation::on_registration_confirmed(SimNode& n, const std::string& cell_id) {
    if (sc_.toggles.vnl_enabled && vnl_capable(n)) {
        dispatch(n, HandoverEvent{HandoverEventKind::RegistrationConfirmed, cell_id});
        if (!std::holds_alternative<Attached>(n.fsm)) return;  // confirm raced a state change
    }
    n.registration_pending = false;
    n.attached_cell = cell_id;
    n.last_serving_cell = cell_id;
    n.weak_fired_bs.clear();
    n.current_vmp.reset();
    n.last_vmp_this_attachment.reset();
    auto& c = cell(cell_id);
    for (const auto& vmp : c.cell.vmps) {
        if (n.inside_vmps.count(vmp.vmp_id)) {
            n.current_vmp = vmp.vmp_id;
            n.last_vmp_this_attachment = vmp.vmp_id;
            break;
        }
    }
    if (std::holds_alternative<Attached>(n.fsm) || !sc_.toggles.vnl_enabled) {
        n.fsm = Attached{cell_id, n.current_vmp};
    }
    update_resolution_on_attach(n, cell_id);
    flush_buffers(n);
}

// ---------------------------------------------------------------------------
// Per-tick evaluation
// ---------------------------------------------------------------------------

void Simulation::evaluate_vnl_node(SimNode& n) {
    double now = queue_.now();

    if (auto bs = serving_bs(n.fsm)) {
        auto& serving = cell(*bs);
        double rss = measured_rss(n, serving);

        if (std::holds_alternative<Attached>(n.fsm)) {
            std::string cause;
            if (n.vmp_exit_outward && sc_.toggles.vmp_exit_mode == VmpExitMode::Geometric) {
                cause = "vmp_exit";
            } else if (sc_.toggles.vmp_exit_mode == VmpExitMode::Rss && n.last_vmp_this_attachment) {
                for (const auto& vmp : serving.cell.vmps) {
                    if (vmp.vmp_id == *n.last_vmp_this_attachment && rss < vmp.vrss_min_dbm) {
                        cause = "vrss_below_min";
                        break;
                    }
                }
            }
            if (cause.empty() && n.last_vmp_this_attachment &&
                rss < predicted_trigger_threshold(n, serving)) {
                cause = "predicted";
            }
            if (!cause.empty()) {
                trace_.append(now, n.spec.id, "ho_trigger",
                              Detail().kv("cell", *bs).kv("cause", cause).kv("rss", rss).str());
                dispatch(n, HandoverEvent{HandoverEventKind::VrssBelowMin, ""});
            }
        }
        n.vmp_exit_outward = false;

        if (serving_bs(n.fsm) && rss < serving.cell.rss_min_dbm) {
            dispatch(n, HandoverEvent{HandoverEventKind::RssBelowMin, ""});
        }
        return;
    }
    n.vmp_exit_outward = false;

    // Detached side: proxy health, target-cell VMPs, weak next-BS detection.
    if (n.proxy) {
        auto& p = node(*n.proxy);
        if (distance(n.pos, p.pos) > sc_.toggles.adhoc_range_m) {
            std::string lost = *n.proxy;
            trace_.append(now, n.spec.id, "proxy_lost", Detail().kv("proxy", lost).str());
            dispatch(n, HandoverEvent{HandoverEventKind::ProxyLost, lost});
        }
    }

    bool can_reattach = std::holds_alternative<DetachedRelay>(n.fsm) ||
                        std::holds_alternative<ReProxy>(n.fsm);
    if (can_reattach) {
        for (auto& [cid, c] : cells_) {
            bool entered = false;
            for (const auto& vmp : c.cell.vmps) {
                if (n.inside_vmps.count(vmp.vmp_id)) {
                    entered = true;
                    break;
                }
            }
            if (entered) {
                dispatch(n, HandoverEvent{HandoverEventKind::EnteredVmp2, cid});
                break;
            }
        }
    }

    if (const auto* s = std::get_if<DetachedRelay>(&n.fsm); s && s->proxy) {
        for (auto& [cid, c] : cells_) {
            if (n.last_serving_cell && cid == *n.last_serving_cell) continue;
            if (n.weak_fired_bs.count(cid)) continue;
            double rss = measured_rss(n, c);
            if (rss >= c.cell.rss_min_dbm - sc_.toggles.weak_detect_offset_db) {
                n.weak_fired_bs.insert(cid);
                trace_.append(now, n.spec.id, "weak_bs2",
                              Detail().kv("bs", cid).kv("rss", rss).str());
                dispatch(n, HandoverEvent{HandoverEventKind::WeakBs2Detected, cid});
                break;
            }
        }
    }
}

void Simulation::evaluate_plain_node(SimNode& n) {
    n.vmp_exit_outward = false;
    if (n.attached_cell) {
        auto& serving = cell(*n.attached_cell);
        if (measured_rss(n, serving) < serving.cell.rss_min_dbm) {
            do_release(n, *n.attached_cell);
            n.fsm = DetachedRelay{std::nullopt};
        }
        return;
    }
    if (n.registration_pending) return;
    // Break-before-make reattach: registration happens from inside a VMP of
    // the target cell.
    for (auto& [cid, c] : cells_) {
        for (const auto& vmp : c.cell.vmps) {
            if (n.inside_vmps.count(vmp.vmp_id)) {
                n.registration_pending = true;
                do_register(n, cid);
                return;
            }
        }
    }
}

void Simulation::flush_buffers(SimNode& n) {
    if (!n.buffer || n.buffer->empty()) return;
    bool proxy_in_range = false;
    if (n.proxy) {
        proxy_in_range = distance(n.pos, node(*n.proxy).pos) <= sc_.toggles.adhoc_range_m;
    }
    if (!n.attached_cell && !proxy_in_range) return;
    auto result = n.buffer->flush(queue_.now());
    reinject(n, result.delivered, result.expired);
}

// ---------------------------------------------------------------------------
// Packet forwarding
// ---------------------------------------------------------------------------

void Simulation::send_session_packet(const SessionSpec& session, std::uint64_t number) {
    std::string pkt = session.id + "-" + std::to_string(number);
    packets_[pkt] = PacketInfo{session.id, session.src, session.dst, 0};
    forward(pkt, Hop{Hop::AtEndpoint, session.src});
}

void Simulation::lose(const std::string& pkt, const std::string& where,
                      const std::string& reason) {
    trace_.append(queue_.now(), where, "packet_lost",
                  Detail().kv("pkt", pkt).kv("session", packets_.at(pkt).session)
                      .kv("reason", reason).str());
}

void Simulation::deliver(const std::string& pkt, const std::string& dst, double latency) {
    queue_.schedule("packet_deliver", dst,
                    Detail().kv("pkt", pkt).kv("session", packets_.at(pkt).session).str(),
                    queue_.now() + latency, nullptr);
}

void Simulation::buffer_packet(SimNode& holder, const std::string& pkt) {
    std::vector<BufferedMsg> expired;
    auto result = holder.buffer->enqueue(pkt, queue_.now(), sc_.toggles.ttl_s, &expired);
    for (const auto& e : expired) {
        trace_.append(queue_.now(), holder.spec.id, "packet_expired",
                      Detail().kv("pkt", e.msg_id).kv("session", packets_.at(e.msg_id).session)
                          .str());
    }
    if (result == EnqueueResult::Accepted) {
        trace_.append(queue_.now(), holder.spec.id, "packet_buffered",
                      Detail().kv("pkt", pkt).kv("session", packets_.at(pkt).session).str());
    } else {
        lose(pkt, holder.spec.id, "capacity");
    }
}

void Simulation::reinject(SimNode& holder, const std::vector<BufferedMsg>& msgs,
                          const std::vector<BufferedMsg>& expired) {
    for (const auto& e : expired) {
        trace_.append(queue_.now(), holder.spec.id, "packet_expired",
                      Detail().kv("pkt", e.msg_id).kv("session", packets_.at(e.msg_id).session)
                          .str());
    }
    if (!msgs.empty()) {
        trace_.append(queue_.now(), holder.spec.id, "packet_flush",
                      Detail().kv("count", msgs.size()).str());
    }
    for (const auto& m : msgs) {
        const auto& info = packets_.at(m.msg_id);
        bool routable = false;
        if (is_node(info.dst) &&
            distance(holder.pos, node(info.dst).pos) <= sc_.toggles.adhoc_range_m) {
            routable = true;  // direct adhoc delivery
        } else if (holder.attached_cell) {
            routable = true;  // infrastructure path
        } else if (holder.proxy &&
                   distance(holder.pos, node(*holder.proxy).pos) <= sc_.toggles.adhoc_range_m) {
            routable = true;  // through own proxy
        }
        if (routable) {
            forward(m.msg_id, Hop{Hop::AtRelay, holder.spec.id});
        } else {
            holder.buffer->restore(m);  // keeps original enqueue time and order
        }
    }
}

void Simulation::forward(const std::string& pkt, const Hop& hop) {
    auto& info = packets_.at(pkt);
    if (++info.hops > 64) {
        lose(pkt, hop.id, "hop_limit");
        return;
    }
    const auto& lat = sc_.toggles.latencies;
    auto hop_event = [&](const char* at, const std::string& id, double delay, Hop next) {
        queue_.schedule("packet_hop", id,
                        Detail().kv("pkt", pkt).kv("at", at).str(), queue_.now() + delay,
                        [this, pkt, next] { forward(pkt, next); });
    };

    switch (hop.kind) {
        case Hop::AtEndpoint: {
            // Packet leaves its source.
            if (is_correspondent(hop.id)) {
                hop_event("core", hop.id, correspondents_.at(hop.id).core_latency_s,
                          Hop{Hop::AtCore, hop.id});
                return;
            }
            auto& src = node(hop.id);
            if (src.attached_cell) {
                hop_event("bs", *src.attached_cell, lat.bs_link_s,
                          Hop{Hop::AtBs, *src.attached_cell});
                return;
            }
            if (src.proxy &&
                distance(src.pos, node(*src.proxy).pos) <= sc_.toggles.adhoc_range_m) {
                hop_event("relay", *src.proxy, lat.adhoc_link_s, Hop{Hop::AtRelay, *src.proxy});
                return;
            }
            buffer_packet(src, pkt);
            return;
        }
        case Hop::AtCore: {
            if (is_correspondent(info.dst)) {
                deliver(pkt, info.dst, correspondents_.at(info.dst).core_latency_s);
                return;
            }
            auto& dst = node(info.dst);
            if (dst.attached_cell) {
                hop_event("bs", *dst.attached_cell, lat.bs_link_s,
                          Hop{Hop::AtBs, *dst.attached_cell});
                return;
            }
            if (dst.proxy) {
                auto& p = node(*dst.proxy);
                if (p.attached_cell) {
                    hop_event("bs", *p.attached_cell, lat.bs_link_s,
                              Hop{Hop::AtBs, *p.attached_cell});
                    return;
                }
                lose(pkt, "core", "proxy_unreachable");
                return;
            }
            lose(pkt, "core", "no_route");
            return;
        }
        case Hop::AtBs: {
            if (is_correspondent(info.dst)) {
                hop_event("core", info.dst, lat.bs_link_s, Hop{Hop::AtCore, info.dst});
                return;
            }
            auto& dst = node(info.dst);
            if (dst.attached_cell == hop.id) {
                deliver(pkt, info.dst, lat.bs_link_s);
                return;
            }
            if (dst.proxy && node(*dst.proxy).attached_cell == hop.id) {
                hop_event("relay", *dst.proxy, lat.bs_link_s, Hop{Hop::AtRelay, *dst.proxy});
                return;
            }
            // Destination moved; hand back to the core.
            hop_event("core", hop.id, lat.bs_link_s, Hop{Hop::AtCore, hop.id});
            return;
        }
        case Hop::AtRelay: {
            auto& relay = node(hop.id);
            if (hop.id != info.src) {
                relay.battery -= sc_.toggles.relay_cost_units;
                trace_.append(queue_.now(), hop.id, "relay_forward",
                              Detail().kv("pkt", pkt)
                                  .kv("energy", sc_.toggles.relay_cost_units).str());
            }
            if (is_node(info.dst)) {
                auto& dst = node(info.dst);
                if (info.dst == hop.id) {
                    // A node flushing its own buffer re-enters here.
                } else if (distance(relay.pos, dst.pos) <= sc_.toggles.adhoc_range_m) {
                    deliver(pkt, info.dst, lat.adhoc_link_s);
                    return;
                }
            }
            if (relay.attached_cell) {
                hop_event("bs", *relay.attached_cell, lat.bs_link_s,
                          Hop{Hop::AtBs, *relay.attached_cell});
                return;
            }
            if (relay.proxy && hop.id != *relay.proxy &&
                distance(relay.pos, node(*relay.proxy).pos) <= sc_.toggles.adhoc_range_m) {
                hop_event("relay", *relay.proxy, lat.adhoc_link_s,
                          Hop{Hop::AtRelay, *relay.proxy});
                return;
            }
            buffer_packet(relay, pkt);
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// Schedulers
// ---------------------------------------------------------------------------

void Simulation::schedule_ticks() {
    queue_.schedule("tick", "-", "", 0.0, [this] { on_tick(); });
}

void Simulation::on_tick() {
    double t = queue_.now();
    double dt = t - last_tick_t_;
    last_tick_t_ = t;

    update_positions(t, dt);
    for (auto& [id, n] : nodes_) geometry_transitions(n);
    for (auto& [id, n] : nodes_) {
        if (sc_.toggles.vnl_enabled && vnl_capable(n)) {
            evaluate_vnl_node(n);
        } else {
            evaluate_plain_node(n);
        }
    }
    for (auto& [id, n] : nodes_) flush_buffers(n);

    ++tick_index_;
    double next = static_cast<double>(tick_index_) * sc_.tick_s;
    if (next > horizon_) {
        if (t < horizon_) {
            next = horizon_;  // final sample lands exactly on the horizon
        } else {
            return;
        }
    }
    if (next <= t) return;
    queue_.schedule("tick", "-", "", next, [this] { on_tick(); });
}

void Simulation::schedule_sessions() {
    for (const auto& s : sc_.sessions) {
        double gap_threshold = sc_.toggles.gap_threshold_s.value_or(s.interval_s + sc_.tick_s);
        std::string detail = Detail()
                                 .kv("session", s.id)
                                 .kv("src", s.src)
                                 .kv("dst", s.dst)
                                 .kv("interval", s.interval_s)
                                 .kv("gap_threshold", gap_threshold)
                                 .str();
        std::string sid = s.id;
        queue_.schedule("session_start", s.src, detail, s.start_s, [this, sid] {
            const SessionSpec* spec = nullptr;
            for (const auto& ss : sc_.sessions) {
                if (ss.id == sid) spec = &ss;
            }
            auto res = resolution_.resolve("loc:" + spec->dst, endpoint_access_node(spec->src));
            trace_.append(queue_.now(), spec->src, "resolve",
                          Detail()
                              .kv("oid", "loc:" + spec->dst)
                              .kv("latency", res.latency_s)
                              .kv("hit", res.hit_level ? dict_level_name(*res.hit_level) : "miss")
                              .str());
        });

        double stop = s.stop_s.value_or(sc_.duration_s);
        std::uint64_t number = 0;
        for (double t = s.start_s; t < stop - 1e-12; t = s.start_s + static_cast<double>(number) * s.interval_s) {
            std::string pkt = s.id + "-" + std::to_string(number);
            std::string pd = Detail().kv("pkt", pkt).kv("session", s.id).kv("dst", s.dst).str();
            SessionSpec spec = s;
            std::uint64_t k = number;
            queue_.schedule("packet_send", s.src, pd, t,
                            [this, spec, k] { send_session_packet(spec, k); });
            ++number;
            if (number > 10'000'000) break;  // scenario sanity bound
        }
    }
}

void Simulation::schedule_paging(const std::string& node_id) {
    auto& n = node(node_id);
    double interval = sc_.toggles.paging_base_interval_s;
    if (sc_.toggles.power_mgmt_enabled) {
        interval = paging_interval(n.spec.activity, n.battery, sc_.toggles.paging_base_interval_s,
                                   sc_.toggles.idle_multiplier, sc_.toggles.battery_floor_units);
    }
    double t = queue_.now() + interval;
    if (t > horizon_) return;
    queue_.schedule("paging_timer", node_id, "", t, [this, node_id] {
        auto& nn = node(node_id);
        if (nn.attached_cell) {
            nn.battery -= sc_.toggles.paging_cost_units;
            trace_.append(queue_.now(), node_id, "location_update",
                          Detail()
                              .kv("cell", *nn.attached_cell)
                              .kv("energy", sc_.toggles.paging_cost_units)
                              .str());
        }
        schedule_paging(node_id);
    });
}

RunResult Simulation::run() {
    horizon_ = sc_.duration_s;
    schedule_ticks();
    schedule_sessions();
    for (auto& [id, n] : nodes_) schedule_paging(id);

    std::size_t processed = queue_.run_until(horizon_);
    RunResult result;
    result.metrics = compute_metrics(trace_);
    result.trace = std::move(trace_);
    result.processed_events = processed;
    return result;
}

RunResult run_scenario(const Scenario& scenario, std::optional<std::uint64_t> seed_override) {
    Simulation sim(scenario, seed_override);
    return sim.run();
}

} // namespace netinf

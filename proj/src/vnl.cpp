#include "netinf/vnl.hpp"

#include <algorithm>
#include <cmath>

namespace netinf {

namespace {

FsmResult ignored(const HandoverState& state) {
    return {state, {Action{ActionKind::LogIgnored, ""}}};
}

} // namespace

FsmResult fsm_step(const HandoverState& state, const HandoverEvent& ev) {
    using K = HandoverEventKind;

    if (const auto* s = std::get_if<Attached>(&state)) {
        switch (ev.kind) {
            case K::VrssBelowMin:
                return {HoPrepare{s->bs, std::nullopt},
                        {Action{ActionKind::StartProxySearch, ""}}};
            case K::RssBelowMin:
                // Released before any proxy was prepared: store and retry.
                return {DetachedRelay{std::nullopt},
                        {Action{ActionKind::ReleaseFromBs1, s->bs},
                         Action{ActionKind::BufferLocally, ""},
                         Action{ActionKind::ScheduleRetrySearch, ""}}};
            default:
                return ignored(state);
        }
    }

    if (const auto* s = std::get_if<HoPrepare>(&state)) {
        switch (ev.kind) {
            case K::ProxyValidated:
            case K::NewProxyValidated: {
                std::vector<Action> actions;
                if (s->validated_proxy && *s->validated_proxy != ev.arg) {
                    actions.push_back(Action{ActionKind::TerminateLink, *s->validated_proxy});
                }
                return {HoPrepare{s->bs, ev.arg}, std::move(actions)};
            }
            case K::RssBelowMin:
                if (s->validated_proxy) {
                    return {DetachedRelay{s->validated_proxy},
                            {Action{ActionKind::ReleaseFromBs1, s->bs}}};
                }
                return {DetachedRelay{std::nullopt},
                        {Action{ActionKind::ReleaseFromBs1, s->bs},
                         Action{ActionKind::BufferLocally, ""},
                         Action{ActionKind::ScheduleRetrySearch, ""}}};
            case K::ProxySearchFailed:
                if (!s->validated_proxy) {
                    return {state, {Action{ActionKind::ScheduleRetrySearch, ""}}};
                }
                return ignored(state);
            case K::ProxyLost:
                if (s->validated_proxy && *s->validated_proxy == ev.arg) {
                    return {HoPrepare{s->bs, std::nullopt},
                            {Action{ActionKind::StartProxySearch, ""}}};
                }
                return ignored(state);
            default:
                return ignored(state);
        }
    }

    if (const auto* s = std::get_if<DetachedRelay>(&state)) {
        switch (ev.kind) {
            case K::WeakBs2Detected:
                if (s->proxy) {
                    return {ReProxy{*s->proxy}, {Action{ActionKind::StartProxySearch, ""}}};
                }
                return {state, {Action{ActionKind::StartProxySearch, ""}}};
            case K::ProxyValidated:
            case K::NewProxyValidated: {
                std::vector<Action> actions;
                if (s->proxy && *s->proxy != ev.arg) {
                    actions.push_back(Action{ActionKind::TerminateLink, *s->proxy});
                }
                return {DetachedRelay{ev.arg}, std::move(actions)};
            }
            case K::EnteredVmp2:
                return {Reattaching{ev.arg, s->proxy},
                        {Action{ActionKind::RegisterWithBs, ev.arg}}};
            case K::ProxyLost:
                if (s->proxy && *s->proxy == ev.arg) {
                    return {DetachedRelay{std::nullopt},
                            {Action{ActionKind::StartProxySearch, ""},
                             Action{ActionKind::BufferLocally, ""}}};
                }
                return ignored(state);
            case K::ProxySearchFailed:
                if (!s->proxy) {
                    return {state, {Action{ActionKind::ScheduleRetrySearch, ""}}};
                }
                return ignored(state);
            default:
                return ignored(state);
        }
    }

    if (const auto* s = std::get_if<ReProxy>(&state)) {
        switch (ev.kind) {
            case K::ProxyValidated:
            case K::NewProxyValidated:
                if (ev.arg == s->old_proxy) {
                    return {DetachedRelay{s->old_proxy}, {}};
                }
                return {DetachedRelay{ev.arg},
                        {Action{ActionKind::TerminateLink, s->old_proxy}}};
            case K::ProxySearchFailed:
                // No better proxy found; keep relaying through the old one.
                return {DetachedRelay{s->old_proxy}, {}};
            case K::ProxyLost:
                if (ev.arg == s->old_proxy) {
                    return {DetachedRelay{std::nullopt},
                            {Action{ActionKind::StartProxySearch, ""},
                             Action{ActionKind::BufferLocally, ""}}};
                }
                return ignored(state);
            case K::EnteredVmp2:
                return {Reattaching{ev.arg, s->old_proxy},
                        {Action{ActionKind::RegisterWithBs, ev.arg}}};
            default:
                return ignored(state);
        }
    }

    if (const auto* s = std::get_if<Reattaching>(&state)) {
        switch (ev.kind) {
            case K::RegistrationConfirmed: {
                std::vector<Action> actions;
                if (s->proxy) {
                    actions.push_back(Action{ActionKind::TerminateLink, *s->proxy});
                }
                return {Attached{s->bs2, std::nullopt}, std::move(actions)};
            }
            case K::ProxyLost:
                if (s->proxy && *s->proxy == ev.arg) {
                    return {Reattaching{s->bs2, std::nullopt},
                            {Action{ActionKind::BufferLocally, ""}}};
                }
                return ignored(state);
            default:
                return ignored(state);
        }
    }

    return ignored(state);  // unreachable with a well-formed variant
}

const char* handover_state_name(const HandoverState& state) {
    struct Namer {
        const char* operator()(const Attached&) const { return "attached"; }
        const char* operator()(const HoPrepare& s) const {
            return s.validated_proxy ? "ho_prepare_validated" : "ho_prepare_searching";
        }
        const char* operator()(const DetachedRelay& s) const {
            return s.proxy ? "detached_relay" : "detached_buffering";
        }
        const char* operator()(const ReProxy&) const { return "reproxy"; }
        const char* operator()(const Reattaching&) const { return "reattaching"; }
    };
    return std::visit(Namer{}, state);
}

const char* handover_event_name(HandoverEventKind kind) {
    switch (kind) {
        case HandoverEventKind::VrssBelowMin: return "vrss_below_min";
        case HandoverEventKind::ProxyValidated: return "proxy_validated";
        case HandoverEventKind::RssBelowMin: return "rss_below_min";
        case HandoverEventKind::WeakBs2Detected: return "weak_bs2_detected";
        case HandoverEventKind::NewProxyValidated: return "new_proxy_validated";
        case HandoverEventKind::EnteredVmp2: return "entered_vmp2";
        case HandoverEventKind::RegistrationConfirmed: return "registration_confirmed";
        case HandoverEventKind::ProxySearchFailed: return "proxy_search_failed";
        case HandoverEventKind::ProxyLost: return "proxy_lost";
    }
    return "unknown";
}

const char* action_name(ActionKind kind) {
    switch (kind) {
        case ActionKind::StartProxySearch: return "start_proxy_search";
        case ActionKind::ReleaseFromBs1: return "release_from_bs";
        case ActionKind::TerminateLink: return "terminate_link";
        case ActionKind::RegisterWithBs: return "register_with_bs";
        case ActionKind::BufferLocally: return "buffer_locally";
        case ActionKind::ScheduleRetrySearch: return "schedule_retry_search";
        case ActionKind::LogIgnored: return "log_ignored";
    }
    return "unknown";
}

std::optional<std::string> state_proxy(const HandoverState& state) {
    if (const auto* s = std::get_if<HoPrepare>(&state)) return s->validated_proxy;
    if (const auto* s = std::get_if<DetachedRelay>(&state)) return s->proxy;
    if (const auto* s = std::get_if<ReProxy>(&state)) return s->old_proxy;
    if (const auto* s = std::get_if<Reattaching>(&state)) return s->proxy;
    return std::nullopt;
}

std::optional<std::string> select_proxy(const Point& pos,
                                        const std::vector<ProxyCandidate>& candidates) {
    const ProxyCandidate* best = nullptr;
    double best_d = 0.0;
    for (const auto& c : candidates) {
        double d = distance(pos, c.pos);
        if (!best || d < best_d || (d == best_d && c.id < best->id)) {
            best = &c;
            best_d = d;
        }
    }
    if (!best) return std::nullopt;
    return best->id;
}

EnqueueResult DtnBuffer::enqueue(const std::string& msg_id, double now, double ttl_s,
                                 std::vector<BufferedMsg>* expired_out) {
    auto expired = purge_expired(now);
    if (expired_out) {
        expired_out->insert(expired_out->end(), expired.begin(), expired.end());
    }
    if (entries_.size() >= capacity_) {
        return EnqueueResult::DroppedCapacity;
    }
    entries_.push_back(BufferedMsg{msg_id, now, ttl_s});
    return EnqueueResult::Accepted;
}

std::vector<BufferedMsg> DtnBuffer::purge_expired(double now) {
    std::vector<BufferedMsg> expired;
    std::deque<BufferedMsg> kept;
    for (auto& m : entries_) {
        if (is_expired(m, now)) {
            expired.push_back(std::move(m));
        } else {
            kept.push_back(std::move(m));
        }
    }
    entries_ = std::move(kept);
    return expired;
}

FlushResult DtnBuffer::flush(double now) {
    FlushResult result;
    result.expired = purge_expired(now);
    result.delivered.assign(entries_.begin(), entries_.end());
    entries_.clear();
    return result;
}

double paging_interval(Activity activity, double battery, double base_interval_s,
                       double idle_multiplier, double battery_floor) {
    if (activity == Activity::Active && battery > battery_floor) {
        return base_interval_s;
    }
    return base_interval_s * idle_multiplier;
}

const MobileAgent& AgentManager::deploy(const std::string& owner, const std::string& target,
                                        NodeKind target_kind, double now) {
    if (target_kind != NodeKind::Nnmn) {
        throw SimError("agent deploy target " + target + " is not an NNMN");
    }
    auto host_it = owner_by_host_.find(target);
    if (host_it != owner_by_host_.end() && host_it->second != owner) {
        throw SimError("node " + target + " already hosts an agent");
    }
    // Migration: drop the previous placement.
    auto old = by_owner_.find(owner);
    if (old != by_owner_.end()) {
        owner_by_host_.erase(old->second.host);
    }
    MobileAgent agent{owner, target, now, false};
    by_owner_[owner] = agent;
    owner_by_host_[target] = owner;
    return by_owner_[owner];
}

void AgentManager::activate(const std::string& owner) {
    auto it = by_owner_.find(owner);
    if (it != by_owner_.end()) it->second.active = true;
}

void AgentManager::remove(const std::string& owner) {
    auto it = by_owner_.find(owner);
    if (it == by_owner_.end()) return;
    owner_by_host_.erase(it->second.host);
    by_owner_.erase(it);
}

bool AgentManager::host_has_active_agent(const std::string& host) const {
    auto it = owner_by_host_.find(host);
    if (it == owner_by_host_.end()) return false;
    auto a = by_owner_.find(it->second);
    return a != by_owner_.end() && a->second.active;
}

std::optional<MobileAgent> AgentManager::agent_of(const std::string& owner) const {
    auto it = by_owner_.find(owner);
    if (it == by_owner_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> AgentManager::host_of(const std::string& owner) const {
    auto it = by_owner_.find(owner);
    if (it == by_owner_.end()) return std::nullopt;
    return it->second.host;
}

TunneledPacket ilctr_wrap(const NetInfRequest& request, const std::string& outer_locator) {
    if (outer_locator.empty()) throw CodecError("ilctr_wrap: empty outer locator");
    if (request.object_id.empty()) throw CodecError("ilctr_wrap: empty object id");
    if (outer_locator.find('|') != std::string::npos ||
        request.object_id.find('|') != std::string::npos ||
        request.payload_ref.find('|') != std::string::npos) {
        throw CodecError("ilctr_wrap: fields must not contain '|'");
    }
    return TunneledPacket{outer_locator, request};
}

NetInfRequest olctr_unwrap(const TunneledPacket& packet) {
    if (packet.outer_locator.empty()) throw CodecError("olctr_unwrap: empty outer locator");
    if (packet.inner.object_id.empty()) throw CodecError("olctr_unwrap: empty object id");
    return packet.inner;
}

std::string packet_to_wire(const TunneledPacket& packet) {
    return packet.outer_locator + "|" + packet.inner.object_id + "|" + packet.inner.payload_ref;
}

TunneledPacket packet_from_wire(const std::string& wire) {
    auto p1 = wire.find('|');
    auto p2 = (p1 == std::string::npos) ? std::string::npos : wire.find('|', p1 + 1);
    if (p2 == std::string::npos) {
        throw CodecError("packet_from_wire: truncated packet: " + wire);
    }
    TunneledPacket pkt;
    pkt.outer_locator = wire.substr(0, p1);
    pkt.inner.object_id = wire.substr(p1 + 1, p2 - p1 - 1);
    pkt.inner.payload_ref = wire.substr(p2 + 1);
    if (pkt.outer_locator.empty() || pkt.inner.object_id.empty()) {
        throw CodecError("packet_from_wire: missing locator or object id: " + wire);
    }
    return pkt;
}

} // namespace netinf

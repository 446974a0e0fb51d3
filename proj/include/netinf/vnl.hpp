#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "netinf/errors.hpp"
#include "netinf/geometry.hpp"

namespace netinf {

enum class NodeKind { Nmn, Nnmn };
enum class Activity { Active, Idle };

// ---------------------------------------------------------------------------
// Handover finite-state machine
//
// States follow the proxy-relay handover cycle: an attached node that drifts
// out of its VMP prepares a proxy, detaches when the serving signal drops
// below rss_min, relays traffic through the proxy (switching proxies as it
// approaches the next base station), and reattaches once it enters a VMP of
// the target cell.
// ---------------------------------------------------------------------------

struct Attached {
    std::string bs;
    std::optional<std::string> vmp;
};
struct HoPrepare {
    std::string bs;
    std::optional<std::string> validated_proxy;  // nullopt while searching
};
struct DetachedRelay {
    std::optional<std::string> proxy;  // nullopt: buffering locally, searching
};
struct ReProxy {
    std::string old_proxy;  // still relaying through this one while searching
};
struct Reattaching {
    std::string bs2;
    std::optional<std::string> proxy;  // kept until registration completes
};

using HandoverState = std::variant<Attached, HoPrepare, DetachedRelay, ReProxy, Reattaching>;

enum class HandoverEventKind {
    VrssBelowMin,
    ProxyValidated,
    RssBelowMin,
    WeakBs2Detected,
    NewProxyValidated,
    EnteredVmp2,
    RegistrationConfirmed,
    ProxySearchFailed,
    ProxyLost,
};

struct HandoverEvent {
    HandoverEventKind kind;
    std::string arg;  // proxy id or base-station id, depending on kind
};

enum class ActionKind {
    StartProxySearch,
    ReleaseFromBs1,
    TerminateLink,     // arg: proxy id
    RegisterWithBs,    // arg: base-station id
    BufferLocally,
    ScheduleRetrySearch,
    LogIgnored,
};

struct Action {
    ActionKind kind;
    std::string arg;
};

struct FsmResult {
    HandoverState next;
    std::vector<Action> actions;
};

// Total transition function: every (state, event) pair yields a defined
// result; pairs outside the protocol map to (state, [LogIgnored]).
FsmResult fsm_step(const HandoverState& state, const HandoverEvent& event);

const char* handover_state_name(const HandoverState& state);
const char* handover_event_name(HandoverEventKind kind);
const char* action_name(ActionKind kind);

// Current validated proxy implied by the state, if any.
std::optional<std::string> state_proxy(const HandoverState& state);

// ---------------------------------------------------------------------------
// Proxy selection
// ---------------------------------------------------------------------------

struct ProxyCandidate {
    std::string id;
    Point pos;
};

// Nearest candidate by Euclidean distance; ties break toward the smaller
// node id. Callers pass only eligible nodes (in adhoc range, NMN or
// agent-hosting NNMN, not self).
std::optional<std::string> select_proxy(const Point& pos,
                                        const std::vector<ProxyCandidate>& candidates);

// ---------------------------------------------------------------------------
// DTN buffer (Data Relay module)
// ---------------------------------------------------------------------------

struct BufferedMsg {
    std::string msg_id;
    double enqueue_t = 0.0;
    double ttl_s = 0.0;
};

enum class EnqueueResult { Accepted, DroppedCapacity };

struct FlushResult {
    std::vector<BufferedMsg> delivered;  // FIFO order
    std::vector<BufferedMsg> expired;
};

// Bounded FIFO store-and-forward buffer. Full buffer drops the incoming
// message (drop-new); entries strictly past their TTL are purged, never
// delivered.
class DtnBuffer {
public:
    explicit DtnBuffer(std::size_t capacity_msgs) : capacity_(capacity_msgs) {}

    EnqueueResult enqueue(const std::string& msg_id, double now, double ttl_s,
                          std::vector<BufferedMsg>* expired_out = nullptr);
    FlushResult flush(double now);
    std::vector<BufferedMsg> purge_expired(double now);
    // Puts a just-flushed entry back unchanged (original enqueue time kept).
    void restore(const BufferedMsg& msg) { entries_.push_back(msg); }

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return entries_.empty(); }

private:
    static bool is_expired(const BufferedMsg& m, double now) {
        return now - m.enqueue_t > m.ttl_s;
    }

    std::size_t capacity_;
    std::deque<BufferedMsg> entries_;
};

// ---------------------------------------------------------------------------
// Power Management module
// ---------------------------------------------------------------------------

// Location-update paging interval: the base interval while active with
// battery above the floor, stretched by idle_multiplier when the node is
// idle or the battery has reached the floor.
double paging_interval(Activity activity, double battery, double base_interval_s,
                       double idle_multiplier, double battery_floor);

// ---------------------------------------------------------------------------
// Mobile Agent
// ---------------------------------------------------------------------------

struct MobileAgent {
    std::string owner;   // NMN whose VNL state the agent replicates
    std::string host;    // NNMN currently hosting it
    double deployed_t = 0.0;
    bool active = false;  // becomes true after the migration latency
};

// Tracks agent placement. Each owner has at most one agent; deploying again
// migrates it. A host carries at most one agent.
class AgentManager {
public:
    // Throws SimError if the target is not an NNMN or already hosts a
    // different owner's agent. Returns the (pending) agent record.
    const MobileAgent& deploy(const std::string& owner, const std::string& target,
                              NodeKind target_kind, double now);
    void activate(const std::string& owner);
    void remove(const std::string& owner);

    bool host_has_active_agent(const std::string& host) const;
    std::optional<MobileAgent> agent_of(const std::string& owner) const;
    std::optional<std::string> host_of(const std::string& owner) const;

private:
    std::map<std::string, MobileAgent> by_owner_;
    std::map<std::string, std::string> owner_by_host_;
};

// ---------------------------------------------------------------------------
// ILCTR / OLCTR encapsulation
// ---------------------------------------------------------------------------

struct NetInfRequest {
    std::string object_id;
    std::string payload_ref;
};

struct TunneledPacket {
    std::string outer_locator;
    NetInfRequest inner;
};

// Wraps a request for transit; the outer locator drives routing, the inner
// request is untouched. Throws CodecError on an empty locator or object id.
TunneledPacket ilctr_wrap(const NetInfRequest& request, const std::string& outer_locator);
NetInfRequest olctr_unwrap(const TunneledPacket& packet);

// Wire form "outer|object_id|payload_ref". Fields must not contain '|'.
std::string packet_to_wire(const TunneledPacket& packet);
TunneledPacket packet_from_wire(const std::string& wire);

} // namespace netinf

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netinf/errors.hpp"

namespace netinf {

enum class DictLevel { AccessNode = 0, PoP = 1, As = 2, Global = 3 };

const char* dict_level_name(DictLevel level);

// Path-based locator: core edge-router prefix plus the sequence of edge
// networks toward the host.
struct PathLocator {
    std::string core_prefix;
    std::vector<std::string> edge_ids;

    bool operator==(const PathLocator&) const = default;
};

// Canonical text form "prefix/e1/e2/...". Segments must be non-empty and
// must not contain the separator.
std::string encode_path_locator(const std::string& prefix, const std::vector<std::string>& edge_ids);
PathLocator decode_path_locator(const std::string& text);

enum class MobilityCase { Terminal, Network };
enum class ResolutionScheme { Llc, Mdht };

// Terminal mobility resolves through path locators (LLC); network mobility
// walks the dictionary hierarchy (MDHT).
ResolutionScheme select_scheme(MobilityCase mobility_case);

// Connectionless hop-by-hop forwarding along a path locator: visits each
// edge in order, accumulating per-edge latency. Unknown edges are errors.
struct LlcRoute {
    std::vector<std::string> hops;
    double latency_s = 0.0;
};
LlcRoute llc_route(const PathLocator& locator, const std::map<std::string, double>& edge_latency_s);

// ---------------------------------------------------------------------------
// 4-level dictionary hierarchy (access node -> PoP -> AS -> global)
// ---------------------------------------------------------------------------

struct ResolveResult {
    std::optional<std::string> locator;  // absent on a global miss
    double latency_s = 0.0;              // sum over every dictionary consulted
    std::optional<DictLevel> hit_level;
    std::vector<std::string> consulted;  // dictionary ids, bottom-up
};

class ResolutionTree {
public:
    struct LevelLatencies {
        double access_s = 0.002;
        double pop_s = 0.010;
        double as_s = 0.040;
        double global_s = 0.120;
    };

    // Builders; the global dictionary is created implicitly as "global".
    void add_as(const std::string& as_id);
    void add_pop(const std::string& pop_id, const std::string& as_id);
    void add_access_node(const std::string& access_id, const std::string& pop_id);
    void set_latencies(const LevelLatencies& lat) { latencies_ = lat; }

    bool has_access_node(const std::string& access_id) const;
    std::vector<std::string> access_node_ids() const;

    // Inserts (oid -> locator) at the access node and every ancestor up to
    // global (4 entries). Republishing overwrites.
    void publish(const std::string& oid, const std::string& locator, const std::string& access_id);

    // Walks up from the local access node; first hit wins; the latency sums
    // every dictionary consulted including the hit (all four on a miss).
    ResolveResult resolve(const std::string& oid, const std::string& from_access) const;

    // Moves the level-1 placement of `oid` from old_access to new_access.
    // Ancestors shared by both paths keep their entry (value refreshed only
    // when new_locator is provided); divergent old ancestors drop it and
    // divergent new ancestors gain it. A missing entry degenerates to a
    // fresh publish at new_access.
    void update_on_handover(const std::string& oid, const std::string& old_access,
                            const std::string& new_access,
                            std::optional<std::string> new_locator = std::nullopt);

    // Table snapshot for locality tests: dictionary id -> (oid -> locator).
    std::map<std::string, std::map<std::string, std::string>> snapshot_tables() const;

private:
    struct Dict {
        DictLevel level;
        std::string parent;
        std::map<std::string, std::string> table;
    };

    // Chain from an access node up to global, inclusive.
    std::vector<std::string> chain_of(const std::string& access_id) const;
    double latency_of(DictLevel level) const;
    Dict& dict(const std::string& id);
    const Dict& dict(const std::string& id) const;

    std::map<std::string, Dict> dicts_{{"global", Dict{DictLevel::Global, "", {}}}};
    LevelLatencies latencies_;
};

} // namespace netinf

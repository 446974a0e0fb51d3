#include "netinf/name_resolution.hpp"

#include <algorithm>

namespace netinf {

const char* dict_level_name(DictLevel level) {
    switch (level) {
        case DictLevel::AccessNode: return "access";
        case DictLevel::PoP: return "pop";
        case DictLevel::As: return "as";
        case DictLevel::Global: return "global";
    }
    return "unknown";
}

std::string encode_path_locator(const std::string& prefix,
                                const std::vector<std::string>& edge_ids) {
    if (prefix.empty()) throw CodecError("path locator prefix must be non-empty");
    if (prefix.find('/') != std::string::npos) {
        throw CodecError("path locator prefix must not contain '/': " + prefix);
    }
    std::string out = prefix;
    for (const auto& e : edge_ids) {
        if (e.empty()) throw CodecError("path locator edge id must be non-empty");
        if (e.find('/') != std::string::npos) {
            throw CodecError("path locator edge id must not contain '/': " + e);
        }
        out += '/';
        out += e;
    }
    return out;
}

PathLocator decode_path_locator(const std::string& text) {
    if (text.empty()) throw CodecError("cannot decode empty path locator");
    PathLocator loc;
    std::size_t start = 0;
    bool first = true;
    while (true) {
        std::size_t slash = text.find('/', start);
        std::string seg = (slash == std::string::npos) ? text.substr(start)
                                                       : text.substr(start, slash - start);
        if (seg.empty()) {
            throw CodecError("path locator has an empty segment: " + text);
        }
        if (first) {
            loc.core_prefix = seg;
            first = false;
        } else {
            loc.edge_ids.push_back(seg);
        }
        if (slash == std::string::npos) break;
        start = slash + 1;
    }
    return loc;
}

ResolutionScheme select_scheme(MobilityCase mobility_case) {
    return mobility_case == MobilityCase::Terminal ? ResolutionScheme::Llc
                                                   : ResolutionScheme::Mdht;
}

LlcRoute llc_route(const PathLocator& locator, const std::map<std::string, double>& edge_latency_s) {
    LlcRoute route;
    for (const auto& e : locator.edge_ids) {
        auto it = edge_latency_s.find(e);
        if (it == edge_latency_s.end()) {
            throw SimError("llc_route: unknown edge network " + e);
        }
        route.hops.push_back(e);
        route.latency_s += it->second;
    }
    return route;
}

void ResolutionTree::add_as(const std::string& as_id) {
    if (dicts_.count(as_id)) throw SimError("duplicate dictionary id: " + as_id);
    dicts_.emplace(as_id, Dict{DictLevel::As, "global", {}});
}

void ResolutionTree::add_pop(const std::string& pop_id, const std::string& as_id) {
    if (dicts_.count(pop_id)) throw SimError("duplicate dictionary id: " + pop_id);
    auto it = dicts_.find(as_id);
    if (it == dicts_.end() || it->second.level != DictLevel::As) {
        throw SimError("add_pop: unknown AS dictionary " + as_id);
    }
    dicts_.emplace(pop_id, Dict{DictLevel::PoP, as_id, {}});
}

void ResolutionTree::add_access_node(const std::string& access_id, const std::string& pop_id) {
    if (dicts_.count(access_id)) throw SimError("duplicate dictionary id: " + access_id);
    auto it = dicts_.find(pop_id);
    if (it == dicts_.end() || it->second.level != DictLevel::PoP) {
        throw SimError("add_access_node: unknown PoP dictionary " + pop_id);
    }
    dicts_.emplace(access_id, Dict{DictLevel::AccessNode, pop_id, {}});
}

bool ResolutionTree::has_access_node(const std::string& access_id) const {
    auto it = dicts_.find(access_id);
    return it != dicts_.end() && it->second.level == DictLevel::AccessNode;
}

std::vector<std::string> ResolutionTree::access_node_ids() const {
    std::vector<std::string> out;
    for (const auto& [id, d] : dicts_) {
        if (d.level == DictLevel::AccessNode) out.push_back(id);
    }
    return out;
}

ResolutionTree::Dict& ResolutionTree::dict(const std::string& id) {
    auto it = dicts_.find(id);
    if (it == dicts_.end()) throw SimError("unknown dictionary node: " + id);
    return it->second;
}

const ResolutionTree::Dict& ResolutionTree::dict(const std::string& id) const {
    auto it = dicts_.find(id);
    if (it == dicts_.end()) throw SimError("unknown dictionary node: " + id);
    return it->second;
}

std::vector<std::string> ResolutionTree::chain_of(const std::string& access_id) const {
    const Dict* d = &dict(access_id);
    if (d->level != DictLevel::AccessNode) {
        throw SimError(access_id + " is not an access-node dictionary");
    }
    std::vector<std::string> chain{access_id};
    std::string cur = access_id;
    while (!d->parent.empty()) {
        cur = d->parent;
        d = &dict(cur);
        chain.push_back(cur);
    }
    return chain;  // access, pop, as, global
}

double ResolutionTree::latency_of(DictLevel level) const {
    switch (level) {
        case DictLevel::AccessNode: return latencies_.access_s;
        case DictLevel::PoP: return latencies_.pop_s;
        case DictLevel::As: return latencies_.as_s;
        case DictLevel::Global: return latencies_.global_s;
    }
    return 0.0;
}

void ResolutionTree::publish(const std::string& oid, const std::string& locator,
                             const std::string& access_id) {
    if (oid.empty()) throw SimError("publish: empty object id");
    for (const auto& id : chain_of(access_id)) {
        dict(id).table[oid] = locator;
    }
}

ResolveResult ResolutionTree::resolve(const std::string& oid, const std::string& from_access) const {
    ResolveResult result;
    for (const auto& id : chain_of(from_access)) {
        const Dict& d = dict(id);
        result.latency_s += latency_of(d.level);
        result.consulted.push_back(id);
        auto hit = d.table.find(oid);
        if (hit != d.table.end()) {
            result.locator = hit->second;
            result.hit_level = d.level;
            return result;
        }
    }
    return result;  // global miss: all four latencies accumulated
}

void ResolutionTree::update_on_handover(const std::string& oid, const std::string& old_access,
                                        const std::string& new_access,
                                        std::optional<std::string> new_locator) {
    auto& old_table = dict(old_access).table;
    auto entry = old_table.find(oid);
    if (entry == old_table.end()) {
        // Nothing to move; treat as a fresh publish.
        publish(oid, new_locator.value_or(""), new_access);
        return;
    }
    std::string locator = new_locator.value_or(entry->second);

    auto old_chain = chain_of(old_access);
    auto new_chain = chain_of(new_access);
    auto in_new = [&](const std::string& id) {
        return std::find(new_chain.begin(), new_chain.end(), id) != new_chain.end();
    };
    auto in_old = [&](const std::string& id) {
        return std::find(old_chain.begin(), old_chain.end(), id) != old_chain.end();
    };

    // Drop the entry from old ancestors that are not on the new path.
    for (const auto& id : old_chain) {
        if (!in_new(id)) dict(id).table.erase(oid);
    }
    // Insert along the new path; shared ancestors keep their entry and are
    // rewritten only when the locator actually changed.
    for (const auto& id : new_chain) {
        auto& table = dict(id).table;
        if (!in_old(id)) {
            table[oid] = locator;
        } else if (new_locator) {
            table[oid] = locator;
        }
    }
}

std::map<std::string, std::map<std::string, std::string>> ResolutionTree::snapshot_tables() const {
    std::map<std::string, std::map<std::string, std::string>> out;
    for (const auto& [id, d] : dicts_) out[id] = d.table;
    return out;
}

} // namespace netinf

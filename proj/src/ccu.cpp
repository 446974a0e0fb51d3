#include "netinf/ccu.hpp"

#include <algorithm>
#include <cmath>

#include "netinf/errors.hpp"

namespace netinf {

void DelayTable::add_sample(const std::string& vmp_id, const std::string& neighbor_bs,
                            double sample_s) {
    auto& e = entries_[{vmp_id, neighbor_bs}];
    e.samples.push_back(sample_s);
    e.sum += sample_s;
}

std::optional<double> DelayTable::average(const std::string& vmp_id,
                                          const std::string& neighbor_bs) const {
    auto it = entries_.find({vmp_id, neighbor_bs});
    if (it == entries_.end() || it->second.samples.empty()) return std::nullopt;
    return it->second.sum / static_cast<double>(it->second.samples.size());
}

const std::vector<double>* DelayTable::samples(const std::string& vmp_id,
                                               const std::string& neighbor_bs) const {
    auto it = entries_.find({vmp_id, neighbor_bs});
    if (it == entries_.end()) return nullptr;
    return &it->second.samples;
}

std::optional<double> probe_handoff_delay_sample(std::optional<double> link_latency_s,
                                                 double processing_delay_s) {
    if (!link_latency_s) return std::nullopt;
    return 2.0 * *link_latency_s + processing_delay_s;
}

void MobilityHistory::on_register(const std::string& node, const std::string& cell) {
    auto pending = pending_from_.find(node);
    if (pending != pending_from_.end()) {
        const std::string& from = pending->second;
        per_node_[node][from][cell] += 1;
        aggregate_[from][cell] += 1;
        pending_from_.erase(pending);
    }
}

void MobilityHistory::on_departure(const std::string& node, const std::string& cell) {
    pending_from_[node] = cell;
}

std::optional<Prediction> MobilityHistory::argmax(const Row& row) {
    if (row.empty()) return std::nullopt;
    std::uint64_t total = 0;
    const std::string* best = nullptr;
    std::uint64_t best_n = 0;
    for (const auto& [to, n] : row) {
        total += n;
        // map iteration is id-ascending, so strict > keeps the smaller id on ties
        if (!best || n > best_n) {
            best = &to;
            best_n = n;
        }
    }
    if (!best || total == 0) return std::nullopt;
    return Prediction{*best, static_cast<double>(best_n) / static_cast<double>(total)};
}

std::optional<Prediction> MobilityHistory::predict_next(const std::string& node,
                                                        const std::string& current_cell) const {
    if (const Row* row = node_row(node, current_cell)) {
        if (auto p = argmax(*row)) return p;
    }
    if (const Row* row = aggregate_row(current_cell)) {
        if (auto p = argmax(*row)) return p;
    }
    return std::nullopt;
}

const MobilityHistory::Row* MobilityHistory::node_row(const std::string& node,
                                                      const std::string& from_cell) const {
    auto n = per_node_.find(node);
    if (n == per_node_.end()) return nullptr;
    auto r = n->second.find(from_cell);
    if (r == n->second.end()) return nullptr;
    return &r->second;
}

const MobilityHistory::Row* MobilityHistory::aggregate_row(const std::string& from_cell) const {
    auto r = aggregate_.find(from_cell);
    if (r == aggregate_.end()) return nullptr;
    return &r->second;
}

const VisitRecord& Ccu::register_node(const std::string& node, double t) {
    auto it = open_.find(node);
    if (it != open_.end()) {
        ++duplicates_;
        return it->second;
    }
    ever_registered_.insert(node);
    auto [ins, ok] = open_.emplace(node, VisitRecord{node, cell_id_, t, std::nullopt});
    (void)ok;
    return ins->second;
}

VisitRecord Ccu::record_departure(const std::string& node, double t) {
    auto it = open_.find(node);
    if (it == open_.end()) {
        throw SimError("record_departure: node " + node + " has no open visit in " + cell_id_);
    }
    VisitRecord rec = it->second;
    rec.t_out = t;
    open_.erase(it);
    closed_.push_back(rec);
    durations_.push_back(t - rec.t_in);
    return rec;
}

bool Ccu::is_registered(const std::string& node) const { return open_.count(node) > 0; }

const VisitRecord* Ccu::open_record(const std::string& node) const {
    auto it = open_.find(node);
    return it == open_.end() ? nullptr : &it->second;
}

double Ccu::stay_probability(double t) const {
    if (durations_.empty()) return 1.0;  // no evidence, do not hasten handover
    std::size_t above = 0;
    for (double d : durations_) {
        if (d > t) ++above;
    }
    return static_cast<double>(above) / static_cast<double>(durations_.size());
}

bool Ccu::validate_identity(const std::string& claimed_id) const {
    if (deny_list_.count(claimed_id)) return false;
    return ever_registered_.count(claimed_id) > 0;
}

std::vector<Vmp> allocate_vmps(const std::string& bs_id, const Point& cell_center,
                               double cell_radius, const RadioParams& radio, int count,
                               double offset_r1, double radius_r) {
    if (count < 1) throw GeometryError("allocate_vmps: count must be >= 1");
    validate_vmp_geometry(radius_r, offset_r1, cell_radius);
    double vrss_min = threshold_from_radius(radio, offset_r1 + radius_r);
    std::vector<Vmp> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        double angle = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(count);
        Vmp vmp;
        vmp.vmp_id = bs_id + "-vmp" + std::to_string(i);
        vmp.center = Point{cell_center.x + offset_r1 * std::cos(angle),
                           cell_center.y + offset_r1 * std::sin(angle)};
        vmp.radius_r = radius_r;
        vmp.offset_r1 = offset_r1;
        vmp.vrss_min_dbm = vrss_min;
        out.push_back(vmp);
    }
    return out;
}

double predicted_rss_trigger(const Cell& cell, const Vmp& vmp, std::optional<double> speed_mps,
                             std::optional<double> avg_handoff_delay_s, double default_speed_mps,
                             double default_handoff_delay_s, double margin_s) {
    double v = speed_mps.value_or(default_speed_mps);
    double d = avg_handoff_delay_s.value_or(default_handoff_delay_s);
    double geometric_exit = vmp.offset_r1 + vmp.radius_r;
    double d_trig = std::max(geometric_exit, cell.radius_R - v * (d + margin_s));
    return rss_dbm(cell.radio, d_trig);
}

} // namespace netinf

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "netinf/geometry.hpp"

namespace netinf {

struct VisitRecord {
    std::string node;
    std::string cell;
    double t_in = 0.0;
    std::optional<double> t_out;
};

// Per-(vmp, neighbor BS) handoff-delay samples with a running average that
// always equals the arithmetic mean of the samples.
class DelayTable {
public:
    void add_sample(const std::string& vmp_id, const std::string& neighbor_bs, double sample_s);
    std::optional<double> average(const std::string& vmp_id, const std::string& neighbor_bs) const;
    const std::vector<double>* samples(const std::string& vmp_id,
                                       const std::string& neighbor_bs) const;

private:
    struct Entry {
        std::vector<double> samples;
        double sum = 0.0;
    };
    std::map<std::pair<std::string, std::string>, Entry> entries_;
};

// Round-trip probe toward a neighbour base station: two link traversals plus
// the neighbour's processing delay. Absent link parameters mean the
// neighbour is unreachable and no sample is produced.
std::optional<double> probe_handoff_delay_sample(std::optional<double> link_latency_s,
                                                 double processing_delay_s);

struct Prediction {
    std::string cell;
    double probability = 0.0;
};

// Per-node first-order transition counts with a per-cell aggregate fallback.
// Shared across the CCUs of one simulation region.
class MobilityHistory {
public:
    // Called when a node registers at `cell`; closes any pending departure
    // into a transition count.
    void on_register(const std::string& node, const std::string& cell);
    void on_departure(const std::string& node, const std::string& cell);

    std::optional<Prediction> predict_next(const std::string& node,
                                           const std::string& current_cell) const;

    using Row = std::map<std::string, std::uint64_t>;
    const Row* node_row(const std::string& node, const std::string& from_cell) const;
    const Row* aggregate_row(const std::string& from_cell) const;

private:
    static std::optional<Prediction> argmax(const Row& row);

    std::map<std::string, std::map<std::string, Row>> per_node_;  // node -> from -> to -> n
    std::map<std::string, Row> aggregate_;                        // from -> to -> n
    std::map<std::string, std::string> pending_from_;             // node -> departed cell
};

// Central Control Unit of one base station: registration and visit history,
// stay-duration statistics, handoff-delay table, identity validation.
class Ccu {
public:
    explicit Ccu(std::string cell_id) : cell_id_(std::move(cell_id)) {}

    const std::string& cell_id() const { return cell_id_; }

    // Opens a visit record; re-registering while a record is open is
    // idempotent and only bumps the duplicate counter.
    const VisitRecord& register_node(const std::string& node, double t);
    // Closes the open record and accumulates the stay duration. Throws
    // SimError when no record is open.
    VisitRecord record_departure(const std::string& node, double t);

    bool is_registered(const std::string& node) const;
    const VisitRecord* open_record(const std::string& node) const;
    const std::vector<VisitRecord>& closed_records() const { return closed_; }
    std::uint64_t duplicate_registrations() const { return duplicates_; }

    // Empirical survival function over completed stays: fraction strictly
    // greater than t; 1.0 with no samples.
    double stay_probability(double t) const;
    const std::vector<double>& stay_durations() const { return durations_; }

    // A claimed identity is valid when it appears anywhere in this CCU's
    // registration history and is not deny-listed.
    bool validate_identity(const std::string& claimed_id) const;
    void deny(const std::string& node_id) { deny_list_.insert(node_id); }

    DelayTable& delay_table() { return delay_table_; }
    const DelayTable& delay_table() const { return delay_table_; }
    std::uint64_t probe_failures() const { return probe_failures_; }
    void count_probe_failure() { ++probe_failures_; }

private:
    std::string cell_id_;
    std::map<std::string, VisitRecord> open_;
    std::vector<VisitRecord> closed_;
    std::vector<double> durations_;
    std::set<std::string> ever_registered_;
    std::set<std::string> deny_list_;
    DelayTable delay_table_;
    std::uint64_t duplicates_ = 0;
    std::uint64_t probe_failures_ = 0;
};

// Places `count` VMPs on the circle of radius r1 around the cell center at
// angles 2*pi*i/count, deriving each vrss_min from the farthest VMP point.
// Throws GeometryError when the geometry constraints fail.
std::vector<Vmp> allocate_vmps(const std::string& bs_id, const Point& cell_center,
                               double cell_radius, const RadioParams& radio, int count,
                               double offset_r1, double radius_r);

// Cross-layer predicted handover trigger: start preparation at distance
// d_trig = max(r1 + r, R - v*(D + margin)) so that a node moving at v
// completes a handoff taking D seconds before reaching the cell edge. The
// returned threshold is the RSS at d_trig; faster nodes and slower handoffs
// yield a higher (earlier) threshold.
double predicted_rss_trigger(const Cell& cell, const Vmp& vmp, std::optional<double> speed_mps,
                             std::optional<double> avg_handoff_delay_s, double default_speed_mps,
                             double default_handoff_delay_s, double margin_s);

} // namespace netinf

#pragma once

#include <string>
#include <vector>

#include "netinf/errors.hpp"

namespace netinf {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance(const Point& a, const Point& b);

// Log-distance path loss parameters. RSS at the reference distance equals
// tx_power_dbm - ref_pathloss_db.
struct RadioParams {
    double tx_power_dbm = 30.0;
    double ref_distance_m = 1.0;
    double ref_pathloss_db = 40.0;
    double pathloss_exponent = 3.5; // typically in [2, 6]
};

// RSS in dBm at distance d. Distances below the reference distance clamp to
// the reference distance; d <= 0 is an error.
double rss_dbm(const RadioParams& radio, double d);

// RSS threshold implied by a radius (same curve as rss_dbm). Used to derive
// rss_min from the cell radius and vrss_min from r1 + r.
double threshold_from_radius(const RadioParams& radio, double d);

// Virtual Mobile Point: a disk of radius r centered offset_r1 meters from
// its base station, near the cell edge.
struct Vmp {
    std::string vmp_id;
    Point center;
    double radius_r = 0.0;
    double offset_r1 = 0.0;
    double vrss_min_dbm = 0.0;
};

struct Cell {
    std::string bs_id;
    Point center;
    double radius_R = 0.0;
    double rss_min_dbm = 0.0;
    RadioParams radio;
    std::vector<Vmp> vmps;
};

// Disk membership, boundary inclusive.
bool in_vmp(const Point& pos, const Vmp& vmp);

// Throws GeometryError unless 0 < r < r1 and r1 + r <= R.
void validate_vmp_geometry(double radius_r, double offset_r1, double cell_radius);

} // namespace netinf

#include "netinf/geometry.hpp"

#include <cmath>
#include <sstream>

namespace netinf {

double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double rss_dbm(const RadioParams& radio, double d) {
    if (d <= 0.0) {
        std::ostringstream os;
        os << "rss_dbm: distance must be positive, got " << d;
        throw GeometryError(os.str());
    }
    if (d < radio.ref_distance_m) {
        d = radio.ref_distance_m;
    }
    return radio.tx_power_dbm - radio.ref_pathloss_db -
           10.0 * radio.pathloss_exponent * std::log10(d / radio.ref_distance_m);
}

double threshold_from_radius(const RadioParams& radio, double d) {
    return rss_dbm(radio, d);
}

bool in_vmp(const Point& pos, const Vmp& vmp) {
    return distance(pos, vmp.center) <= vmp.radius_r;
}

void validate_vmp_geometry(double radius_r, double offset_r1, double cell_radius) {
    std::ostringstream os;
    if (!(radius_r > 0.0)) {
        os << "VMP radius r must be positive, got " << radius_r;
        throw GeometryError(os.str());
    }
    if (!(radius_r < offset_r1)) {
        os << "VMP requires r < r1, got r=" << radius_r << " r1=" << offset_r1;
        throw GeometryError(os.str());
    }
    if (!(offset_r1 + radius_r <= cell_radius)) {
        os << "VMP must lie inside the cell: r1 + r = " << (offset_r1 + radius_r)
           << " exceeds R = " << cell_radius;
        throw GeometryError(os.str());
    }
}

} // namespace netinf

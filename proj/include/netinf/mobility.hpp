#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netinf/geometry.hpp"
#include "netinf/random.hpp"

namespace netinf {

// One leg endpoint. speed_mps is the constant speed of the leg ENDING here;
// the first waypoint's speed is ignored.
struct Waypoint {
    Point pos;
    double speed_mps = 0.0;
};

// Scripted piecewise-linear trajectory. The node halts at the final waypoint.
class ScriptedTrajectory {
public:
    explicit ScriptedTrajectory(std::vector<Waypoint> waypoints);
    Point position_at(double t) const;
    const std::vector<Waypoint>& waypoints() const { return waypoints_; }

private:
    std::vector<Waypoint> waypoints_;
    std::vector<double> arrival_times_;  // arrival_times_[i] = time node reaches waypoint i
};

struct RandomWaypointConfig {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
    double min_speed = 1.0, max_speed = 1.0;
};

struct RandomWaypointState {
    Point pos;
    Point target;
    double speed = 0.0;
    bool has_target = false;
};

// Standard random-waypoint update: move toward the current target; on
// arrival draw a fresh uniform target and uniform speed from `stream_id`
// (draw order: target.x, target.y, speed) and spend the remaining dt on it.
RandomWaypointState step_random_waypoint(RandomWaypointState state,
                                         const RandomWaypointConfig& cfg, double dt,
                                         RandomStreams& streams, const std::string& stream_id);

struct PositionSample {
    double t = 0.0;
    Point pos;
};

// Average speed over the trailing window: total path length of the samples
// inside [t_latest - window_s, t_latest] divided by window_s. Requires at
// least two samples in the window; otherwise the estimate is absent and the
// caller falls back to a configured default.
std::optional<double> speed_estimate(std::span<const PositionSample> history, double window_s);

// Times t >= 0 at which the line origin + velocity*t crosses the circle,
// ascending. Test oracle for tick-detected boundary events.
std::vector<double> analytic_crossing_times(const Point& origin, const Point& velocity,
                                            const Point& center, double radius);

} // namespace netinf

#include "netinf/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace netinf {

ScriptedTrajectory::ScriptedTrajectory(std::vector<Waypoint> waypoints)
    : waypoints_(std::move(waypoints)) {
    if (waypoints_.empty()) {
        throw SimError("scripted trajectory needs at least one waypoint");
    }
    arrival_times_.resize(waypoints_.size());
    arrival_times_[0] = 0.0;
    for (std::size_t i = 1; i < waypoints_.size(); ++i) {
        double leg = distance(waypoints_[i - 1].pos, waypoints_[i].pos);
        double speed = waypoints_[i].speed_mps;
        if (!(speed > 0.0)) {
            throw SimError("waypoint leg speed must be positive");
        }
        arrival_times_[i] = arrival_times_[i - 1] + leg / speed;
    }
}

Point ScriptedTrajectory::position_at(double t) const {
    if (t <= 0.0) return waypoints_.front().pos;
    if (t >= arrival_times_.back()) return waypoints_.back().pos;
    // Find the leg containing t.
    auto it = std::upper_bound(arrival_times_.begin(), arrival_times_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - arrival_times_.begin());
    const Point& a = waypoints_[i - 1].pos;
    const Point& b = waypoints_[i].pos;
    double t0 = arrival_times_[i - 1];
    double t1 = arrival_times_[i];
    double frac = (t - t0) / (t1 - t0);
    return Point{a.x + frac * (b.x - a.x), a.y + frac * (b.y - a.y)};
}

RandomWaypointState step_random_waypoint(RandomWaypointState state,
                                         const RandomWaypointConfig& cfg, double dt,
                                         RandomStreams& streams, const std::string& stream_id) {
    auto draw_target = [&]() {
        state.target.x = streams.uniform_in(stream_id, cfg.min_x, cfg.max_x);
        state.target.y = streams.uniform_in(stream_id, cfg.min_y, cfg.max_y);
        state.speed = streams.uniform_in(stream_id, cfg.min_speed, cfg.max_speed);
        state.has_target = true;
    };
    if (!state.has_target) draw_target();

    double remaining = dt;
    // A degenerate region pins every target to the same point.
    int arrivals = 0;
    while (remaining > 0.0) {
        double d = distance(state.pos, state.target);
        if (d <= 1e-12) {
            if (++arrivals > 64) break;  // zero-size region: nowhere to go
            draw_target();
            d = distance(state.pos, state.target);
            if (d <= 1e-12) continue;
        }
        double step = state.speed * remaining;
        if (step >= d) {
            state.pos = state.target;
            remaining -= d / state.speed;
            if (++arrivals > 64) break;
            draw_target();
        } else {
            double frac = step / d;
            state.pos.x += frac * (state.target.x - state.pos.x);
            state.pos.y += frac * (state.target.y - state.pos.y);
            remaining = 0.0;
        }
    }
    return state;
}

std::optional<double> speed_estimate(std::span<const PositionSample> history, double window_s) {
    if (history.size() < 2 || !(window_s > 0.0)) return std::nullopt;
    double t_end = history.back().t;
    double t_start = t_end - window_s;
    double path = 0.0;
    std::size_t in_window = 0;
    const PositionSample* prev = nullptr;
    for (const auto& s : history) {
        if (s.t < t_start - 1e-12) continue;
        ++in_window;
        if (prev) path += distance(prev->pos, s.pos);
        prev = &s;
    }
    if (in_window < 2) return std::nullopt;
    return path / window_s;
}

std::vector<double> analytic_crossing_times(const Point& origin, const Point& velocity,
                                            const Point& center, double radius) {
    // |origin + velocity*t - center|^2 = radius^2
    double rx = origin.x - center.x;
    double ry = origin.y - center.y;
    double a = velocity.x * velocity.x + velocity.y * velocity.y;
    double b = 2.0 * (rx * velocity.x + ry * velocity.y);
    double c = rx * rx + ry * ry - radius * radius;
    std::vector<double> out;
    if (a <= 0.0) return out;
    double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return out;
    double sq = std::sqrt(disc);
    double t1 = (-b - sq) / (2.0 * a);
    double t2 = (-b + sq) / (2.0 * a);
    if (t1 >= 0.0) out.push_back(t1);
    if (t2 >= 0.0 && t2 != t1) out.push_back(t2);
    return out;
}

} // namespace netinf

#include <doctest.h>

#include <string>
#include <vector>

#include "netinf/event_queue.hpp"
#include "netinf/trace.hpp"

using namespace netinf;

TEST_CASE("same-time events run FIFO by scheduling order") {
    Trace trace;
    EventQueue q(trace);
    std::vector<std::string> order;
    q.schedule("X", "-", "", 5.0, [&] { order.push_back("X"); });
    q.schedule("Y", "-", "", 5.0, [&] { order.push_back("Y"); });
    q.run_until(10.0);
    REQUIRE(order == std::vector<std::string>{"X", "Y"});
}

TEST_CASE("scheduling in the past is rejected with the offending time") {
    Trace trace;
    EventQueue q(trace);
    q.schedule("a", "-", "", 4.0, nullptr);
    q.run_until(4.0);
    CHECK_THROWS_AS(q.schedule("late", "-", "", 3.0, nullptr), SchedulingError);
    try {
        q.schedule("late", "-", "", 3.0, nullptr);
    } catch (const SchedulingError& e) {
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
}

TEST_CASE("draining a queue leaves the clock at the last event") {
    Trace trace;
    EventQueue q(trace);
    q.schedule("only", "-", "", 1.0, nullptr);
    q.run_all();
    CHECK(q.now() == 1.0);
}

TEST_CASE("run_until with no events advances the clock to t_end") {
    Trace trace;
    EventQueue q(trace);
    CHECK(q.run_until(7.5) == 0);
    CHECK(q.now() == 7.5);
}

TEST_CASE("run_until stops at t_end with events still queued") {
    Trace trace;
    EventQueue q(trace);
    for (double t : {1.0, 2.0, 3.0}) q.schedule("e", "-", "", t, nullptr);
    CHECK(q.run_until(2.0) == 2);
    CHECK(q.now() == 2.0);
    CHECK_FALSE(q.empty());
}

TEST_CASE("handlers may schedule follow-ups that land in the same run") {
    Trace trace;
    EventQueue q(trace);
    std::vector<double> seen;
    q.schedule("first", "-", "", 1.0, [&] {
        seen.push_back(q.now());
        q.schedule("followup", "-", "", 1.5, [&] { seen.push_back(q.now()); });
    });
    CHECK(q.run_until(2.0) == 2);
    REQUIRE(seen == std::vector<double>{1.0, 1.5});
}

TEST_CASE("every scheduled event at or before the horizon appears exactly once") {
    Trace trace;
    EventQueue q(trace);
    // A deterministic but scrambled batch of times.
    std::vector<double> times;
    unsigned state = 12345;
    for (int i = 0; i < 200; ++i) {
        state = state * 1664525u + 1013904223u;
        times.push_back(static_cast<double>(state % 1000) / 100.0);  // [0, 10)
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        q.schedule("ev" + std::to_string(i), "-", "", times[i], nullptr);
    }
    q.run_until(10.0);
    REQUIRE(trace.size() == times.size());

    // Processing order is totally ordered: times non-decreasing, and within
    // equal times the original scheduling order is kept.
    for (std::size_t i = 1; i < trace.rows().size(); ++i) {
        CHECK(trace.rows()[i].time >= trace.rows()[i - 1].time);
        if (trace.rows()[i].time == trace.rows()[i - 1].time) {
            int a = std::stoi(trace.rows()[i - 1].kind.substr(2));
            int b = std::stoi(trace.rows()[i].kind.substr(2));
            CHECK(a < b);
        }
    }
    // Exactly-once: every event id present.
    std::vector<bool> seen(times.size(), false);
    for (const auto& row : trace.rows()) {
        seen[static_cast<std::size_t>(std::stoi(row.kind.substr(2)))] = true;
    }
    for (bool b : seen) CHECK(b);
}

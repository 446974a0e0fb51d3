#include <doctest.h>

#include <vector>

#include "netinf/random.hpp"

using namespace netinf;

TEST_CASE("same seed and stream give identical sequences across runs") {
    RandomStreams a(42), b(42);
    a.register_stream("mobility");
    b.register_stream("mobility");
    for (int i = 0; i < 100; ++i) CHECK(a.uniform("mobility") == b.uniform("mobility"));
}

TEST_CASE("streams are independent of each other's draw pattern") {
    RandomStreams a(7), b(7);
    a.register_stream("mobility");
    a.register_stream("radio");
    b.register_stream("mobility");
    b.register_stream("radio");

    // Run A interleaves the two streams; run B drains radio first. The
    // mobility sequence must be unchanged.
    std::vector<double> mobility_a, mobility_b;
    for (int i = 0; i < 50; ++i) {
        mobility_a.push_back(a.uniform("mobility"));
        a.uniform("radio");
        a.uniform("radio");
    }
    for (int i = 0; i < 100; ++i) b.uniform("radio");
    for (int i = 0; i < 50; ++i) mobility_b.push_back(b.uniform("mobility"));
    CHECK(mobility_a == mobility_b);
}

TEST_CASE("unknown stream is an error") {
    RandomStreams rng(1);
    CHECK_THROWS_AS(rng.uniform("never-registered"), SimError);
}

TEST_CASE("uniform draws have a sane empirical mean") {
    RandomStreams rng(2024);
    rng.register_stream("u");
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        double v = rng.uniform("u");
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
        sum += v;
    }
    double mean = sum / n;
    CHECK(mean > 0.45);
    CHECK(mean < 0.55);
}

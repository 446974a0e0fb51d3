#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "netinf/errors.hpp"

namespace netinf {

// Named, independently seeded random streams. Each stream's sequence depends
// only on (master seed, stream id, draw index), so adding a stream or
// reordering draws across streams never perturbs another stream.
class RandomStreams {
public:
    explicit RandomStreams(std::uint64_t master_seed) : master_seed_(master_seed) {}

    void register_stream(const std::string& stream_id);
    bool has_stream(const std::string& stream_id) const;

    // Uniform in [0, 1). Throws SimError for an unregistered stream.
    double uniform(const std::string& stream_id);
    double uniform_in(const std::string& stream_id, double lo, double hi);

    // Zero-mean Gaussian via Box-Muller from two uniforms (no cached spare,
    // keeps the draw count per call fixed).
    double normal(const std::string& stream_id, double sigma);

    std::uint64_t master_seed() const { return master_seed_; }

private:
    std::mt19937_64& stream(const std::string& stream_id);

    std::uint64_t master_seed_;
    std::map<std::string, std::mt19937_64> streams_;
};

} // namespace netinf

#include "netinf/random.hpp"

#include <cmath>

namespace netinf {

namespace {

// FNV-1a over the stream id, then splitmix64 to spread the bits.
std::uint64_t derive_seed(std::uint64_t master, const std::string& id) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : id) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::uint64_t z = master ^ h;
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

void RandomStreams::register_stream(const std::string& stream_id) {
    if (streams_.count(stream_id)) return;
    streams_.emplace(stream_id, std::mt19937_64(derive_seed(master_seed_, stream_id)));
}

bool RandomStreams::has_stream(const std::string& stream_id) const {
    return streams_.count(stream_id) > 0;
}

std::mt19937_64& RandomStreams::stream(const std::string& stream_id) {
    auto it = streams_.find(stream_id);
    if (it == streams_.end()) {
        throw SimError("unknown random stream: " + stream_id);
    }
    return it->second;
}

double RandomStreams::uniform(const std::string& stream_id) {
    // 53 high bits -> [0, 1); bit-stable across platforms, unlike
    // std::uniform_real_distribution.
    return std::ldexp(static_cast<double>(stream(stream_id)() >> 11), -53);
}

double RandomStreams::uniform_in(const std::string& stream_id, double lo, double hi) {
    return lo + (hi - lo) * uniform(stream_id);
}

double RandomStreams::normal(const std::string& stream_id, double sigma) {
    double u1 = uniform(stream_id);
    double u2 = uniform(stream_id);
    if (u1 <= 0.0) u1 = std::ldexp(1.0, -53);
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace netinf

#pragma once

#include <cstdint>

namespace msched {

// Counter-based random stream: every draw is a pure function of
// (seed, stream, counter), so samples for one job never depend on how many
// draws were made for another. Mixing is three rounds of the splitmix64
// finalizer over the combined key.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    std::uint64_t bits(std::uint64_t counter) const {
        std::uint64_t x = seed_;
        x = mix(x ^ mix(stream_ + 0x9e3779b97f4a7c15ULL));
        x = mix(x ^ mix(counter + 0xbf58476d1ce4e5b9ULL));
        return mix(x);
    }

    // uniform in (0, 1); never returns exactly 0 or 1
    double uniform(std::uint64_t counter) const {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1p-53;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
};

} // namespace msched

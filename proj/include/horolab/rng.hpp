#pragma once

#include <cstdint>

namespace hl {

// Counter-based generator: every variate is a pure hash of
// (seed, stream, index, slot). Streams/samples can be evaluated in any
// order and on any number of threads with bit-identical results.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL))) {}

    std::uint64_t bits(std::uint64_t index, std::uint64_t slot) const {
        std::uint64_t h = splitmix64(key_ ^ (index * 0x8CB92BA72F3D8DD7ULL));
        return splitmix64(h ^ (slot * 0xEB44ACCAB455D165ULL));
    }

    // uniform in [0, 1)
    double u01(std::uint64_t index, std::uint64_t slot) const {
        return static_cast<double>(bits(index, slot) >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double uniform(std::uint64_t index, std::uint64_t slot, double lo, double hi) const {
        return lo + (hi - lo) * u01(index, slot);
    }

private:
    std::uint64_t key_;
};

} // namespace hl

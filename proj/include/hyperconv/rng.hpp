#pragma once

#include <cstdint>
#include <random>

namespace hyperconv {

// Seeded, splittable stream handle. Identical (seed, stream_id) give the
// same engine; distinct stream_ids are decorrelated by splitmix hashing.
struct RngStream {
    std::uint64_t seed = 42;
    std::uint64_t stream_id = 0;

    RngStream split(std::uint64_t offset) const {
        return {seed, stream_id + offset};
    }

    std::mt19937_64 engine() const {
        std::uint64_t s = mix(seed ^ mix(stream_id + 0x9e3779b97f4a7c15ull));
        return std::mt19937_64(s);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

} // namespace hyperconv

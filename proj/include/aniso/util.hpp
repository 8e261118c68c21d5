#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace aniso {

// Seeded uniforms. mt19937_64 output is pinned by the standard and the
// mapping below avoids implementation-defined distribution internals, so
// streams are reproducible across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }  // [0,1)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::uint64_t bits() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace aniso

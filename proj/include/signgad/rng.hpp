#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>
#include <vector>

namespace signgad {

// Portable deterministic RNG (splitmix64 core). The standard library's
// distributions are implementation-defined, which would break byte-identical
// reports across toolchains, so everything stochastic in the pipeline draws
// from this.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n) {
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Standard normal via Box-Muller; the spare value is cached.
    double normal();

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Derives a stage seed from a root seed and a stage name (FNV-1a over the
// name, mixed through splitmix64). Lets every pipeline stage be reproduced
// in isolation from the single configured seed.
std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view stage);

// Variant with an index (per-workflow, per-fold, ...).
std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view stage, std::uint64_t index);

} // namespace signgad

#pragma once

#include <cstdint>
#include <vector>

namespace phconn {

// Self-contained PRNG (xoshiro256++ seeded through splitmix64). The standard
// library's distributions are implementation-defined, so every sampling
// routine the library needs is implemented here; identical seeds give
// identical streams everywhere.
class Rng {
public:
    explicit Rng(uint64_t seed);

    uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform();
    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller; draws are cached in pairs.
    double normal();

    /// Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi);

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (int i = static_cast<int>(values.size()) - 1; i > 0; --i) {
            int j = uniform_int(0, i);
            std::swap(values[static_cast<size_t>(i)], values[static_cast<size_t>(j)]);
        }
    }

    /// k distinct indices from [0, n), in sampling order.
    std::vector<int> sample_indices(int n, int k);

    /// Seed for an independent substream; derive(s, a) != derive(s, b) for a != b.
    static uint64_t derive(uint64_t seed, uint64_t stream);

private:
    uint64_t state_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace phconn

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace anm {

/// Seeded random source whose draws are bit-identical across standard
/// libraries. The engine is std::mt19937_64 (fully specified by the
/// standard); the distribution transforms are written out here because the
/// <random> distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer on [0, n).
    std::uint64_t uniform_index(std::uint64_t n);
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    bool bernoulli(double prob) { return uniform() < prob; }

    std::vector<int> permutation(int n);

    template <typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Splittable seed derivation: independent streams for replicate k of a run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace anm

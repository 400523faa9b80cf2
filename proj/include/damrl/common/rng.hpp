#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace damrl {

/// Deterministic random stream. All distributions are generated from raw
/// 64-bit draws (no std::*_distribution), so sequences are identical across
/// standard-library implementations.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi);
    /// Uniform integer in [0, n). n must be > 0.
    int uniform_int(int n);
    /// Standard normal (Box-Muller).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    /// Gamma(shape, scale), Marsaglia-Tsang.
    double gamma(double shape, double scale);

private:
    std::mt19937_64 gen_;
};

/// Stable seed derivation: hashes (master, tag) so that changing how one
/// component consumes randomness does not perturb the others.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

inline RngStream derive_stream(std::uint64_t master, std::string_view tag) {
    return RngStream(derive_seed(master, tag));
}

} // namespace damrl

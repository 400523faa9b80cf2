#include "damrl/common/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace damrl {

double RngStream::uniform() {
    // 53 random bits -> [0,1) with full double resolution.
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

int RngStream::uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
        v = gen_();
    } while (v >= limit);
    return static_cast<int>(v % bound);
}

double RngStream::normal() {
    // Box-Muller without the cached spare: two uniforms per draw keeps the
    // stream state independent of call interleaving.
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::gamma(double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0)
        throw std::invalid_argument("gamma: shape and scale must be positive");
    if (shape < 1.0) {
        // Boost to shape+1 and correct with a power of a uniform.
        const double u = std::max(uniform(), 1e-300);
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v * scale;
    }
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
    // FNV-1a over the tag, mixed with the master through splitmix64 finalizers.
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL + h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace damrl

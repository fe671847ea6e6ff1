#pragma once

#include <cmath>
#include <cstdint>

namespace lsv {

/// Philox4x64-10 counter-based generator.
///
/// Stateless: every 256-bit counter maps to an independent 256-bit random
/// block under a 128-bit key, so draws are addressable by
/// (seed, particle, step, stream) and results cannot depend on scheduling.
struct Philox4x64 {
    std::uint64_t v[4];

    static Philox4x64 block(std::uint64_t c0, std::uint64_t c1, std::uint64_t c2,
                            std::uint64_t c3, std::uint64_t k0, std::uint64_t k1) {
        constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ULL;
        constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
        constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
        constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;
        for (int r = 0; r < 10; ++r) {
            if (r > 0) { k0 += W0; k1 += W1; }
            const __uint128_t p0 = static_cast<__uint128_t>(M0) * c0;
            const __uint128_t p1 = static_cast<__uint128_t>(M1) * c2;
            const std::uint64_t hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const std::uint64_t lo0 = static_cast<std::uint64_t>(p0);
            const std::uint64_t hi1 = static_cast<std::uint64_t>(p1 >> 64);
            const std::uint64_t lo1 = static_cast<std::uint64_t>(p1);
            const std::uint64_t n0 = hi1 ^ c1 ^ k0;
            const std::uint64_t n2 = hi0 ^ c3 ^ k1;
            c0 = n0; c1 = lo1; c2 = n2; c3 = lo0;
        }
        return {{c0, c1, c2, c3}};
    }
};

/// Uniform in (0,1), strictly open, from one 64-bit word.  Two exact terms:
/// the top word can otherwise round to 1.0 under a fused (x + 0.5) scheme.
inline double uniform_open(std::uint64_t x) {
    return static_cast<double>(x >> 12) * 0x1p-52 + 0x1p-53;
}

/// Addressable N(0,1) streams keyed by (seed, particle, step, stream).
///
/// Each address yields a Box-Muller pair from one Philox block; `stream`
/// identifiers partition independent uses (driver increments, residuals,
/// idiosyncratic spot noise) so callers never share counters by accident.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : seed_(seed) {}

    void pair(std::uint64_t particle, std::uint64_t step, std::uint64_t stream,
              double& z0, double& z1) const {
        const Philox4x64 b =
            Philox4x64::block(particle, step, stream, 0, seed_, SALT);
        const double u1 = uniform_open(b.v[0]);
        const double u2 = uniform_open(b.v[1]);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        z0 = rad * std::cos(ang);
        z1 = rad * std::sin(ang);
    }

    double one(std::uint64_t particle, std::uint64_t step, std::uint64_t stream) const {
        double z0, z1;
        pair(particle, step, stream, z0, z1);
        return z0;
    }

    std::uint64_t seed() const { return seed_; }

private:
    static constexpr std::uint64_t SALT = 0x6C73762D6E726D6CULL;
    std::uint64_t seed_;
};

/// Deterministic seed derivation for sub-purposes (repricing, replications).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
    Philox4x64 b = Philox4x64::block(purpose, 0, 0, 0, seed, 0x7365656464657276ULL);
    return b.v[0];
}

} // namespace lsv

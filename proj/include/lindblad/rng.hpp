#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

namespace lindblad {

/// Philox4x32-10 block function (Salmon et al., SC'11). Stateless: maps a
/// 128-bit counter and 64-bit key to 128 pseudo-random bits.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter block(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// SplitMix64 finalizer; used only to fold (seed, grid index) into a key.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Identifies one independent random stream: a base seed, a parameter-grid
/// point, a realization, and the role of the matrix being drawn (0 for the
/// Hamiltonian, 1..k for jump operators, larger values for auxiliary use).
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t grid_index = 0;
    std::uint32_t realization = 0;
    std::uint32_t role = 0;

    constexpr StreamKey with_role(std::uint32_t r) const noexcept {
        StreamKey k = *this;
        k.role = r;
        return k;
    }
};

/// Random-access stream of uniform and Gaussian deviates.
///
/// Every deviate is addressed by a 64-bit index, so the value drawn for a
/// matrix entry depends only on (key, index) and never on loop order or
/// thread scheduling. A Gaussian pair at index `i` is produced by the
/// Marsaglia polar method: attempt `a` encrypts the counter
/// (i_lo, i_hi | a << 24, role, realization) and turns the four output words
/// into two 53-bit uniforms on (-1, 1); the first accepted attempt wins.
class CounterRng {
public:
    constexpr CounterRng() = default;
    explicit constexpr CounterRng(const StreamKey& key) noexcept
        : key_(key), folded_(fold(key)) {}

    const StreamKey& key() const noexcept { return key_; }

    /// Raw 128-bit block for (index, attempt).
    Philox4x32::Counter raw(std::uint64_t index, std::uint32_t attempt = 0) const noexcept {
        const Philox4x32::Counter ctr{
            static_cast<std::uint32_t>(index),
            static_cast<std::uint32_t>(index >> 32) ^ (attempt << 24),
            key_.role,
            key_.realization,
        };
        return Philox4x32::block(ctr, folded_);
    }

    /// Uniform deviate in [0, 1) with 53 random bits.
    double uniform(std::uint64_t index) const noexcept {
        const auto b = raw(index);
        return to_unit(join(b[0], b[1]));
    }

    /// Two independent standard normal deviates.
    std::pair<double, double> normal_pair(std::uint64_t index) const noexcept {
        for (std::uint32_t attempt = 0;; ++attempt) {
            const auto b = raw(index, attempt);
            const double u = 2.0 * to_unit(join(b[0], b[1])) - 1.0;
            const double v = 2.0 * to_unit(join(b[2], b[3])) - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) {
                const double f = std::sqrt(-2.0 * std::log(s) / s);
                return {u * f, v * f};
            }
        }
    }

    double normal(std::uint64_t index) const noexcept { return normal_pair(index).first; }

private:
    static constexpr std::uint64_t join(std::uint32_t a, std::uint32_t b) noexcept {
        return (std::uint64_t{a} << 32) | b;
    }
    static constexpr double to_unit(std::uint64_t bits) noexcept {
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }
    static constexpr Philox4x32::Key fold(const StreamKey& k) noexcept {
        const std::uint64_t h = k.grid_index == 0 ? k.seed : mix64(k.seed ^ mix64(k.grid_index));
        return {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    }

    StreamKey key_{};
    Philox4x32::Key folded_{};
};

}  // namespace lindblad

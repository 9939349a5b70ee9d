#pragma once

#include <array>
#include <cstdint>

/// Counter-based random numbers: Philox4x32-10 and an inverse-CDF normal.
namespace optrace::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// One Philox4x32-10 block.
inline Counter philox4x32(Counter c, Key k) noexcept {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53u) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57u) * c[2];
        c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
        k[0] += 0x9E3779B9u;
        k[1] += 0xBB67AE85u;
    }
    return c;
}

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Standard normal quantile (Wichura's AS 241, about 1e-16 relative).
double normal_quantile(double p) noexcept;

/// Stream of one path: the counter is (block, path), the key is derived
/// from (seed, stream). Draws are a pure function of (seed, stream, path,
/// draw index).
class PathStream {
public:
    PathStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t path) noexcept;

    /// Two uniforms in (0, 1) with 53 random bits each, from one block.
    std::array<double, 2> uniform_pair() noexcept;
    /// Two independent standard normals from one block.
    std::array<double, 2> normal_pair() noexcept;
    std::uint64_t next_u64() noexcept;

private:
    Key key_;
    std::uint64_t path_;
    std::uint64_t block_ = 0;
};

}  // namespace optrace::rng

#pragma once

// Counter-based random numbers so each Monte Carlo draw can be generated
// independently of every other draw and of thread scheduling.
//
// Generator: Philox4x32-10 (Salmon et al., SC'11), as in Random123.
//   key     = (seed & 0xffffffff, seed >> 32)
//   counter = (draw & 0xffffffff, draw >> 32, stream, attempt)
// Each block yields two 53-bit uniforms u = ((w0 >> 5) * 2^26 + (w1 >> 6)) / 2^53
// from word pairs (x0, x1) and (x2, x3). A Box-Muller transform turns
// (1 - u_a, u_b) into z0 = r cos(2 pi u_b), z1 = r sin(2 pi u_b) with
// r = sqrt(-2 ln(1 - u_a)). The truncated normal returns z0 if |z0| <= 4,
// else z1 if |z1| <= 4, else repeats with attempt + 1.

#include <array>
#include <cstdint>

namespace carbonledger {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key);
    static Key key_from_seed(std::uint64_t seed) {
        return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    }
};

inline constexpr double kTruncationSigmas = 4.0;

/// Stateless normal generator addressed by (draw, stream).
class CounterNormal {
public:
    explicit CounterNormal(std::uint64_t seed) : key_(Philox4x32::key_from_seed(seed)) {}

    /// Standard normal truncated to [-4, 4] by resampling.
    double truncated(std::uint64_t draw, std::uint32_t stream) const;

    /// Two uniforms in [0, 1) from one block.
    std::array<double, 2> uniforms(std::uint64_t draw, std::uint32_t stream, std::uint32_t attempt) const;

private:
    Philox4x32::Key key_;
};

}  // namespace carbonledger

#include "carbonledger/rng.hpp"

#include <cmath>
#include <numbers>

namespace carbonledger {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Counter round(const Philox4x32::Counter& c, const Philox4x32::Key& k) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline double uniform53(std::uint32_t a, std::uint32_t b) {
    return (static_cast<double>(a >> 5) * 67108864.0 + static_cast<double>(b >> 6)) *
           (1.0 / 9007199254740992.0);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter counter, Key key) {
    counter = round(counter, key);
    for (int i = 1; i < 10; ++i) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
        counter = round(counter, key);
    }
    return counter;
}

std::array<double, 2> CounterNormal::uniforms(std::uint64_t draw, std::uint32_t stream,
                                              std::uint32_t attempt) const {
    const auto w = Philox4x32::generate(
        {static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32), stream, attempt}, key_);
    return {uniform53(w[0], w[1]), uniform53(w[2], w[3])};
}

double CounterNormal::truncated(std::uint64_t draw, std::uint32_t stream) const {
    for (std::uint32_t attempt = 0;; ++attempt) {
        const auto [ua, ub] = uniforms(draw, stream, attempt);
        const double r = std::sqrt(-2.0 * std::log(1.0 - ua));
        const double theta = 2.0 * std::numbers::pi * ub;
        const double z0 = r * std::cos(theta);
        if (std::abs(z0) <= kTruncationSigmas) return z0;
        const double z1 = r * std::sin(theta);
        if (std::abs(z1) <= kTruncationSigmas) return z1;
    }
}

}  // namespace carbonledger

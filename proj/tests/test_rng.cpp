#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "carbonledger/rng.hpp"
#include "carbonledger/stats.hpp"
#include "oracles.hpp"

using namespace carbonledger;

// Known-answer vectors published with the Random123 library (kat_vectors).
TEST_CASE("philox4x32-10 known answers") {
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("seed splits into key words") {
    CHECK(Philox4x32::key_from_seed(0x0123456789abcdefULL) == Philox4x32::Key{0x89abcdef, 0x01234567});
}

TEST_CASE("uniforms lie in [0, 1) and vary with every address part") {
    CounterNormal g(42);
    std::set<double> seen;
    for (std::uint64_t d = 0; d < 200; ++d) {
        for (std::uint32_t s = 0; s < 3; ++s) {
            for (std::uint32_t a = 0; a < 2; ++a) {
                for (double u : g.uniforms(d, s, a)) {
                    CHECK(u >= 0.0);
                    CHECK(u < 1.0);
                    seen.insert(u);
                }
            }
        }
    }
    CHECK(seen.size() == 200 * 3 * 2 * 2);
    CHECK(CounterNormal(1).uniforms(0, 0, 0) != CounterNormal(2).uniforms(0, 0, 0));
    CHECK(g.uniforms(1ULL << 32, 0, 0) != g.uniforms(0, 0, 0));
}

TEST_CASE("truncated normal is addressable and reproducible") {
    CounterNormal a(7), b(7);
    for (std::uint64_t d = 0; d < 1000; d += 37) {
        CHECK(a.truncated(d, 5) == b.truncated(d, 5));
    }
    // order of evaluation does not matter
    const double late = a.truncated(999, 1);
    for (std::uint64_t d = 0; d < 999; ++d) a.truncated(d, 1);
    CHECK(a.truncated(999, 1) == late);
}

TEST_CASE("truncated normal moments and bounds") {
    CounterNormal g(20181231);
    const std::size_t n = 200000;
    std::vector<double> z(n);
    std::size_t inside_one = 0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = g.truncated(i, 2);
        CHECK(std::abs(z[i]) <= kTruncationSigmas);
        if (std::abs(z[i]) <= 1.0) ++inside_one;
    }
    const double m = oracle::brute_sum(z) / n;
    CHECK(std::abs(m) < 5.0 / std::sqrt(double(n)));
    CHECK(oracle::sample_sd(z) == doctest::Approx(1.0).epsilon(0.01));
    CHECK(double(inside_one) / n == doctest::Approx(0.682689).epsilon(0.005));

    // streams are not copies of each other
    double cross = 0.0;
    for (std::size_t i = 0; i < 20000; ++i) cross += g.truncated(i, 2) * g.truncated(i, 3);
    CHECK(std::abs(cross / 20000) < 0.04);
}

TEST_CASE("quantiles and distribution helpers") {
    const std::vector<double> xs{1, 2, 3, 4, 5};
    CHECK(stats::quantile_sorted(xs, 0.0) == 1.0);
    CHECK(stats::quantile_sorted(xs, 1.0) == 5.0);
    CHECK(stats::quantile_sorted(xs, 0.5) == 3.0);
    // type 7: h = (n - 1) p
    CHECK(stats::quantile_sorted(xs, 0.16) == doctest::Approx(1.64));
    CHECK(stats::quantile_sorted(xs, 0.84) == doctest::Approx(4.36));

    CHECK(stats::normal_quantile(0.84) == doctest::Approx(oracle::kZ84).epsilon(1e-12));
    CHECK(stats::normal_quantile(0.5) == doctest::Approx(0.0).scale(1.0));
    // tabulated Student-t quantiles
    CHECK(stats::student_t_quantile(0.975, 10) == doctest::Approx(2.228138852).epsilon(1e-8));
    CHECK(stats::student_t_quantile(0.84, 25) == doctest::Approx(1.014633999).epsilon(1e-8));
    CHECK(stats::sigma_from_half_width(oracle::kZ84) == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> v{-10, 0, 10};
    CHECK(stats::sample_sd(v) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(stats::mean(v) == 0.0);
}

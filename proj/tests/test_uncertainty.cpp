#include <doctest.h>

#include "carbonledger/error.hpp"
#include "carbonledger/stats.hpp"
#include "carbonledger/uncertainty.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace carbonledger;
using testing::fuel_record;

namespace {

Dataset coal_only() {
    Dataset d;
    d.insert(fuel_record(Period::annual(2017), SourceKind::coal, 3.5e9, 2.7e8, 8e6, 0, 4.5e7));
    return d;
}

Dataset four_sources() {
    Dataset d;
    d.insert(fuel_record(Period::annual(2017), SourceKind::coal, 3.5e9, 2.7e8, 8e6, 3e7, 4.5e7));
    d.insert(fuel_record(Period::annual(2017), SourceKind::oil, 1.9e8, 4.2e8, 4e7, -2e6, 2.5e7));
    d.insert(fuel_record(Period::annual(2017), SourceKind::natural_gas, 1.5e11, 9e10, 3e9, 1e8, 1e9));
    d.insert(fuel_record(Period::annual(2017), SourceKind::cement, 2.3e9));
    return d;
}

UncertaintySpec only(std::initializer_list<std::pair<FactorKey, double>> sigmas, std::size_t draws,
                     std::uint64_t seed = 1) {
    auto s = UncertaintySpec::none();
    for (const auto& [k, v] : sigmas) s.relative_sigma[k] = v;
    s.draws = draws;
    s.seed = seed;
    return s;
}

double relative_half_band(const UncertaintyResult& r) {
    return 0.5 * (r.band->hi.magnitude() - r.band->lo.magnitude()) / r.central.magnitude();
}

}  // namespace

TEST_CASE("zero sigmas give a degenerate band") {
    const auto r = monte_carlo_band(four_sources(), testing::full_factors(), 2017, only({}, 1000));
    REQUIRE(r.band.has_value());
    CHECK(r.band->lo == r.central);
    CHECK(r.band->hi == r.central);
}

TEST_CASE("the central value is the plain emission estimate") {
    const auto d = four_sources();
    const auto f = testing::full_factors();
    const auto r = monte_carlo_band(d, f, 2017, UncertaintySpec::defaults());
    CHECK(r.central.magnitude() == doctest::Approx(total_emissions(d, f, 2017, 2017).front().total.magnitude()));
}

TEST_CASE("fewer than 100 draws refuse the band but keep the central value") {
    const auto r = monte_carlo_band(coal_only(), testing::full_factors(), 2017,
                                    only({{{InputKind::production, SourceKind::coal}, 0.02}}, 99));
    CHECK_FALSE(r.band.has_value());
    CHECK(r.central.magnitude() > 0.0);
}

TEST_CASE("one multiplicative input at 7.4% gives a 7.4% half band") {
    const auto r = monte_carlo_band(coal_only(), testing::full_factors(), 2017,
                                    only({{{InputKind::carbon_content, SourceKind::coal}, 0.074}}, 100000));
    // 16th/84th percentiles of a normal sit at +-0.9945 sigma
    CHECK(std::abs(100.0 * relative_half_band(r) - 7.4 * oracle::kZ84) <= 0.3);
    CHECK(std::abs(100.0 * relative_half_band(r) - 7.4) <= 0.3);
}

TEST_CASE("two independent 5% inputs combine in quadrature") {
    const auto r = monte_carlo_band(coal_only(), testing::full_factors(), 2017,
                                    only({{{InputKind::carbon_content, SourceKind::coal}, 0.05},
                                          {{InputKind::heating_value, SourceKind::coal}, 0.05}},
                                         100000));
    CHECK(std::abs(100.0 * relative_half_band(r) - 100.0 * oracle::quadrature({0.05, 0.05})) <= 0.3);
}

TEST_CASE("percentile sandwich") {
    const auto d = four_sources();
    const auto f = testing::full_factors();
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto spec = UncertaintySpec::defaults();
        spec.seed = seed;
        spec.draws = 2000;
        auto totals = simulate_totals(YearModel::build(d, f, 2017), spec, spec.draws);
        std::sort(totals.begin(), totals.end());
        const double median = stats::quantile_sorted(totals, 0.5);
        const auto band = percentile_band(totals);
        CHECK(band.lo.magnitude() <= median);
        CHECK(median <= band.hi.magnitude());
    }
}

TEST_CASE("serial and parallel draws are bit-identical") {
    const auto m = YearModel::build(four_sources(), testing::full_factors(), 2017);
    auto spec = UncertaintySpec::defaults();
    spec.stock_change_abs_sigma[SourceKind::coal] = 3e7;
    spec.seed = 99;
    const auto serial = simulate_totals(m, spec, 5000, ExecutionPolicy::serial());
    for (int threads : {2, 3, 8}) {
        CHECK(simulate_totals(m, spec, 5000, ExecutionPolicy::parallel(threads)) == serial);
    }
    // and across repeated runs
    CHECK(simulate_totals(m, spec, 5000, ExecutionPolicy::serial()) == serial);
}

TEST_CASE("fast kernel agrees with the typed reference path") {
    const auto m = YearModel::build(four_sources(), testing::full_factors(), 2017);
    auto spec = UncertaintySpec::defaults();
    for (auto k : all_factor_keys()) spec.relative_sigma[k] = 0.03;
    spec.stock_change_abs_sigma[SourceKind::oil] = 5e6;
    spec.seed = 5;
    const auto fast = simulate_totals(m, spec, 500, ExecutionPolicy::serial());
    const auto ref = simulate_totals_reference(m, spec, 500);
    REQUIRE(fast.size() == ref.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
        CHECK(fast[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
}

TEST_CASE("a different seed gives different draws") {
    const auto m = YearModel::build(coal_only(), testing::full_factors(), 2017);
    const auto a = simulate_totals(m, only({{{InputKind::production, SourceKind::coal}, 0.02}}, 100, 1), 100);
    const auto b = simulate_totals(m, only({{{InputKind::production, SourceKind::coal}, 0.02}}, 100, 2), 100);
    CHECK(a != b);
}

TEST_CASE("contribution decomposition") {
    const auto d = coal_only();
    const auto f = testing::full_factors();
    const auto single =
        contribution_decomposition(d, f, 2017, only({{{InputKind::oxidation, SourceKind::coal}, 0.01}}, 2000));
    REQUIRE(single.size() == 1);
    CHECK(single[0].percent == doctest::Approx(100.0));

    const auto pair = contribution_decomposition(d, f, 2017,
                                                 only({{{InputKind::heating_value, SourceKind::coal}, 0.03},
                                                       {{InputKind::carbon_content, SourceKind::coal}, 0.03}},
                                                      20000));
    REQUIRE(pair.size() == 2);
    CHECK(std::abs(pair[0].percent - 50.0) <= 1.0);
    CHECK(std::abs(pair[1].percent - 50.0) <= 1.0);

    auto spec = UncertaintySpec::defaults();
    spec.draws = 2000;
    spec.stock_change_abs_sigma[SourceKind::coal] = 3e7;
    const auto all = contribution_decomposition(four_sources(), f, 2017, spec);
    double sum = 0.0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        sum += all[i].percent;
        if (i > 0) CHECK(all[i - 1].percent >= all[i].percent);
    }
    CHECK(std::abs(sum - 100.0) <= 0.1);

    try {
        contribution_decomposition(d, f, 2017, only({}, 1000));
        FAIL("expected undefined contributions");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::undefined_contributions);
    }
}

TEST_CASE("stock change sigma") {
    const std::vector<double> flat{5, 5, 5, 5};
    CHECK(stock_change_sigma(flat) == 0.0);
    const std::vector<double> v{-10, 0, 10};
    CHECK(stock_change_sigma(v) == doctest::Approx(std::sqrt(200.0 / 2.0)).epsilon(1e-15));
    for (double k : {-3.0, 0.5, 1e6}) {
        std::vector<double> s;
        for (double x : {4.0, -1.0, 7.5, 2.0, -6.0}) s.push_back(k * x);
        CHECK(stock_change_sigma(s) ==
              doctest::Approx(std::abs(k) * oracle::sample_sd({4.0, -1.0, 7.5, 2.0, -6.0})).epsilon(1e-12));
    }
    const std::vector<double> two{1, 2};
    try {
        stock_change_sigma(two);
        FAIL("expected insufficient data");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::insufficient_data);
    }
}

TEST_CASE("stock history picks the recorded years") {
    Dataset d;
    d.insert(fuel_record(Period::annual(2000), SourceKind::coal, 1, 0, 0, -10));
    d.insert(fuel_record(Period::annual(2001), SourceKind::coal, 1, 0, 0, 0));
    d.insert(fuel_record(Period::annual(2003), SourceKind::coal, 1, 0, 0, 10));
    const auto h = stock_change_history(d, SourceKind::coal, 1999, 2003);
    CHECK(h == std::vector<double>{-10, 0, 10});
    CHECK(stock_change_sigma(h) == doctest::Approx(10.0));
}

TEST_CASE("additive stock sigma widens the band") {
    const auto d = four_sources();
    const auto f = testing::full_factors();
    auto spec = only({{{InputKind::production, SourceKind::coal}, 0.01}}, 5000);
    const double narrow = relative_half_band(monte_carlo_band(d, f, 2017, spec));
    spec.stock_change_abs_sigma[SourceKind::coal] = 1e8;
    const double wide = relative_half_band(monte_carlo_band(d, f, 2017, spec));
    CHECK(wide > narrow);
}

TEST_CASE("band edges converge on the bundled data") {
    const auto d = load_dataset({testing::data_dir() / "flows_annual.csv"});
    const auto cfg = load_scenario_config(testing::data_dir() / "scenarios.ini");
    auto spec = cfg.uncertainty;
    spec.draws = 50000;
    const auto a = monte_carlo_band(d, cfg.default_set(), 2017, spec);
    spec.draws = 100000;
    const auto b = monte_carlo_band(d, cfg.default_set(), 2017, spec);
    CHECK(std::abs(b.band->lo.magnitude() / a.band->lo.magnitude() - 1.0) < 0.005);
    CHECK(std::abs(b.band->hi.magnitude() / a.band->hi.magnitude() - 1.0) < 0.005);
}

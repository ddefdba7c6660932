#include <doctest.h>

#include <random>
#include <sstream>

#include "carbonledger/error.hpp"
#include "carbonledger/ingest.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace carbonledger;
using testing::fuel_record;

namespace {

const char* kHeader = "year,month,source,production,import,export,stock_change,non_energy_use\n";

Dataset parse(const std::string& text) {
    std::istringstream in(text);
    return parse_flows_csv(in, "flows.csv");
}

std::vector<Diagnostic> parse_errors(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.diagnostics();
    }
    FAIL("expected ParseError");
    return {};
}

bool mentions(const std::vector<Diagnostic>& ds, const std::string& text) {
    for (const auto& d : ds) {
        if (d.message.find(text) != std::string::npos) return true;
    }
    return false;
}

ScenarioConfig config(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario_config(in, "test.ini");
}

std::vector<Diagnostic> config_errors(const std::string& text) {
    try {
        config(text);
    } catch (const ParseError& e) {
        return e.diagnostics();
    }
    FAIL("expected ParseError");
    return {};
}

Dataset monthly_panel(SourceKind s, int year, const std::vector<double>& production) {
    Dataset d;
    for (std::size_t m = 0; m < production.size(); ++m) {
        d.insert(fuel_record(Period::monthly(year, static_cast<int>(m) + 1), s, production[m], 2.0 * m, 1.0, 0.5,
                             0.25));
    }
    return d;
}

}  // namespace

TEST_CASE("flow row maps onto a FlowRecord in base units") {
    const auto d = parse(std::string(kHeader) + "2018,10,coal,2850,25,0.4,12,30\n");
    REQUIRE(d.flows.size() == 1);
    const auto& r = d.flows.begin()->second;
    CHECK(r.period == Period::monthly(2018, 10));
    CHECK(r.source == SourceKind::coal);
    CHECK(r.production == Quantity(2850e6, Unit::tonne));
    CHECK(r.imports == Quantity(25e6, Unit::tonne));
    CHECK(r.exports == Quantity(0.4e6, Unit::tonne));
    CHECK(r.stock_change == Quantity(12e6, Unit::tonne));
    CHECK(r.non_energy_use == Quantity(30e6, Unit::tonne));
    CHECK(r.sector == "national");
}

TEST_CASE("natural gas file unit is 1e9 m3") {
    const auto d = parse(std::string(kHeader) + "2017,,natural_gas,148.5,95,3.5,-1.25,10\n");
    const auto& r = d.flows.begin()->second;
    CHECK(r.production == Quantity(148.5e9, Unit::cubic_metre));
    CHECK(r.stock_change == Quantity(-1.25e9, Unit::cubic_metre));
}

TEST_CASE("unknown source is rejected with its line") {
    const auto ds = parse_errors(std::string(kHeader) + "2017,,coal,1,0,0,0,0\n2017,,kohle,1,0,0,0,0\n");
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].message.find("unknown source") != std::string::npos);
    CHECK(ds[0].message.find("at line 3") != std::string::npos);
    CHECK(ds[0].line == 3);
    CHECK(ds[0].column == 3);
}

TEST_CASE("duplicate keys are rejected") {
    const auto ds = parse_errors(std::string(kHeader) + "2017,,coal,1,0,0,0,0\n2017,,coal,2,0,0,0,0\n");
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].message.find("duplicate key") != std::string::npos);
    CHECK(ds[0].line == 3);
    // distinct sectors are distinct keys
    const auto d = parse(
        "year,month,source,production,import,export,stock_change,non_energy_use,sector\n"
        "2017,,coal,1,0,0,0,0,power\n2017,,coal,2,0,0,0,0,industry\n");
    CHECK(d.flows.size() == 2);
    CHECK(d.aggregate(SourceKind::coal, Period::annual(2017))->production == Quantity(3e6, Unit::tonne));
}

TEST_CASE("every bad row is reported, with locations") {
    const auto ds = parse_errors(std::string(kHeader) +
                                 "2017,,coal,abc,0,0,0,0\n"
                                 "2017,13,oil,1,0,0,0,0\n"
                                 "2017,,cement,1,5,0,0,0\n"
                                 "2017,,oil,-1,0,0,0,0\n"
                                 "2017,,oil,1,0,0\n");
    CHECK(ds.size() == 5);
    CHECK(mentions(ds, "malformed number 'abc'"));
    CHECK(mentions(ds, "month"));
    CHECK(mentions(ds, "cement carries production only"));
    CHECK(mentions(ds, "negative production"));
    CHECK(mentions(ds, "expected 8 fields"));
}

TEST_CASE("header problems") {
    CHECK(mentions(parse_errors(""), "missing header"));
    CHECK(mentions(parse_errors("year,month,source,production,import,export,stock,non_energy_use\n"),
                   "unknown column 'stock'"));
    CHECK(mentions(parse_errors("year,month,source,production,import,export,non_energy_use\n"),
                   "missing column 'stock_change'"));
}

TEST_CASE("missing non_energy_use column defaults to zero") {
    const auto d = parse("year,month,source,production,import,export,stock_change\n2018,1,oil,10,20,3,0\n");
    CHECK(d.flows.begin()->second.non_energy_use == Quantity(0.0, Unit::tonne));
}

TEST_CASE("comments, blank lines and a BOM are skipped") {
    const auto d = parse("\xEF\xBB\xBF# note\n" + std::string(kHeader) + "\n2017,,coal,1,0,0,0,0\n# tail\n");
    CHECK(d.flows.size() == 1);
}

TEST_CASE("write then parse round-trips exactly") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> digits(0, 999999);
    std::uniform_int_distribution<int> scale(0, 6);
    auto value = [&](bool signed_ok) {
        double v = digits(rng) / std::pow(10.0, scale(rng));
        if (signed_ok && digits(rng) % 2) v = -v;
        return v;
    };
    Dataset d;
    for (int y = 2000; y < 2018; ++y) {
        for (auto s : kAllSources) {
            const auto u = native_unit(s);
            const double k = s == SourceKind::natural_gas ? 1e9 : 1e6;
            auto r = FlowRecord::zero(Period::annual(y), s, y % 3 ? "national" : "power");
            r.production = Quantity(value(false) * k, u);
            if (is_fuel(s)) {
                r.imports = Quantity(value(false) * k, u);
                r.exports = Quantity(value(false) * k, u);
                r.stock_change = Quantity(value(true) * k, u);
                r.non_energy_use = Quantity(value(false) * k, u);
            }
            d.insert(r);
            if (y == 2017) {
                for (int m = 1; m <= 10; ++m) {
                    auto mr = r;
                    mr.period = Period::monthly(2018, m);
                    mr.production = Quantity(value(false) * k, u);
                    d.insert(mr);
                }
            }
        }
    }
    std::ostringstream out;
    write_flows_csv(d, out);
    const auto again = parse(out.str());
    CHECK(again == d);
    std::ostringstream out2;
    write_flows_csv(again, out2);
    CHECK(out2.str() == out.str());
}

TEST_CASE("later files restate earlier ones and leave an audit trail") {
    auto first = parse(std::string(kHeader) + "2017,,coal,100,0,0,0,0\n2016,,coal,90,0,0,0,0\n");
    const auto second = parse(std::string(kHeader) + "2017,,coal,105,0,0,0,0\n");
    first.merge(second, "revision.csv");
    CHECK(first.aggregate(SourceKind::coal, Period::annual(2017))->production == Quantity(105e6, Unit::tonne));
    CHECK(first.aggregate(SourceKind::coal, Period::annual(2016))->production == Quantity(90e6, Unit::tonne));
    REQUIRE(first.audit.size() == 1);
    CHECK(first.audit[0].origin == "revision.csv");
}

TEST_CASE("load_dataset merges in argument order") {
    testing::TempDir tmp("ingest");
    testing::write_file(tmp / "a.csv", std::string(kHeader) + "2017,,coal,100,0,0,0,0\n");
    testing::write_file(tmp / "b.csv", std::string(kHeader) + "2017,,coal,105,0,0,0,0\n");
    CHECK(load_dataset({tmp / "a.csv", tmp / "b.csv"}).aggregate(SourceKind::coal, Period::annual(2017))->production ==
          Quantity(105e6, Unit::tonne));
    CHECK(load_dataset({tmp / "b.csv", tmp / "a.csv"}).aggregate(SourceKind::coal, Period::annual(2017))->production ==
          Quantity(100e6, Unit::tonne));
}

TEST_CASE("non-contiguous monthly data fails the dataset invariants") {
    testing::TempDir tmp("gap");
    testing::write_file(tmp / "m.csv", std::string(kHeader) + "2018,1,coal,1,0,0,0,0\n2018,3,coal,1,0,0,0,0\n");
    CHECK_THROWS_AS(load_dataset({tmp / "m.csv"}), ParseError);
}

TEST_CASE("cumulative_months examples") {
    const auto d = monthly_panel(SourceKind::coal, 2018, {10, 20, 30});
    const auto jan = cumulative_months(d, SourceKind::coal, 2018, 1);
    auto expected = d.flows.begin()->second;
    expected.period = Period::monthly(2018, 1);
    CHECK(jan == expected);
    CHECK(cumulative_months(d, SourceKind::coal, 2018, 3).production.magnitude() == 60.0);
    CHECK(cumulative_months(d, SourceKind::coal, 2018, 3).period == Period::monthly(2018, 3));

    const auto flat = monthly_panel(SourceKind::oil, 2018, std::vector<double>(10, 100.0));
    CHECK(cumulative_months(flat, SourceKind::oil, 2018, 10).production.magnitude() ==
          oracle::brute_sum(std::vector<double>(10, 100.0)));
}

TEST_CASE("cumulative_months differences recover each month") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1e8);
    std::vector<double> p(12);
    for (auto& x : p) x = u(rng);
    const auto d = monthly_panel(SourceKind::natural_gas, 2015, p);
    for (int n = 2; n <= 12; ++n) {
        const auto a = cumulative_months(d, SourceKind::natural_gas, 2015, n);
        const auto b = cumulative_months(d, SourceKind::natural_gas, 2015, n - 1);
        const auto& m = d.flows.at(FlowKey{Period::monthly(2015, n), SourceKind::natural_gas, "national"});
        CHECK((a.production - b.production).magnitude() == doctest::Approx(m.production.magnitude()).epsilon(1e-9));
        CHECK((a.imports - b.imports).magnitude() == doctest::Approx(m.imports.magnitude()).epsilon(1e-9));
        CHECK((a.stock_change - b.stock_change).magnitude() ==
              doctest::Approx(m.stock_change.magnitude()).epsilon(1e-9));
    }
}

TEST_CASE("cumulative_months names the gap") {
    Dataset d = monthly_panel(SourceKind::coal, 2018, {1, 1, 1, 1});
    d.flows.erase(FlowKey{Period::monthly(2018, 3), SourceKind::coal, "national"});
    try {
        cumulative_months(d, SourceKind::coal, 2018, 5);
        FAIL("expected incomplete prefix");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::incomplete_prefix);
        CHECK(std::string(e.what()).find("3, 5") != std::string::npos);
    }
}

TEST_CASE("gdp and product files") {
    std::istringstream gdp("year,gdp_index,secondary_share\n2017,100,0.4\n2018,106.6,\n");
    const auto g = parse_gdp_csv(gdp);
    CHECK(g.gdp.at(2018) == 106.6);
    CHECK(g.secondary_share.size() == 1);

    std::istringstream bad("year,gdp_index,secondary_share\n2017,0,0.4\n2018,5,1.5\n");
    try {
        parse_gdp_csv(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.diagnostics().size() == 2);
    }

    std::istringstream prod("year,month,product,output\n2017,,crude_steel,831\n2018,1,crude_steel,70\n");
    const auto p = parse_products_csv(prod);
    CHECK(p.industrial_products.size() == 2);
}

TEST_CASE("built-in presets") {
    const auto ts = *builtin_preset("this-study");
    CHECK(ts.heating_value.at(SourceKind::coal, 2018) == 20.95);
    CHECK(ts.carbon_content_of(SourceKind::coal) == 26.59);
    CHECK(ts.oxidation_at(SourceKind::coal, 2018) == 0.92);
    CHECK(builtin_preset("BP")->oxidation_at(SourceKind::coal, 2018) == 1.00);
    CHECK(builtin_preset("UNFCCC-CN")->oxidation_at(SourceKind::coal, 2018) == 0.94);
    CHECK(builtin_preset("CDIAC")->oxidation_at(SourceKind::coal, 2018) == 0.98);
    for (const auto* name : {"EDGAR", "EIA", "WorldBank"}) {
        CHECK(builtin_preset(name)->oxidation_at(SourceKind::coal, 2018) == 1.00);
    }
    CHECK(builtin_preset("UN-HV")->heating_value.at(SourceKind::coal, 2018) == 21.4);
    CHECK(builtin_preset("IPCC-default")->carbon_content_of(SourceKind::coal) == 25.9);
    CHECK_FALSE(builtin_preset("nope").has_value());
}

TEST_CASE("scenario config with presets, common keys and series") {
    const auto cfg = config(
        "default = this-study\n"
        "scenarios = BP\n"
        "[common]\n"
        "heating_value.oil = 41.8\ncarbon_content.oil = 20.0\noxidation.oil = 0.98\n"
        "cement_factor = 0.0855\n"
        "[this-study]\n"
        "heating_value.coal = 20.95, 2000=21.3, 2001=21.1\n"
        "[custom]\n"
        "preset = BP\n"
        "oxidation.coal = 0.95\n"
        "[uncertainty]\n"
        "draws = 500\nseed = 9\nsigma.statistical_error = 0.02\nsigma.statistical_error.oil = 0.05\n"
        "sigma_abs.stock_change.coal = 30\n");
    CHECK(cfg.default_scenario == "this-study");
    REQUIRE(cfg.scenarios.size() == 3);
    const auto& ts = cfg.find("this-study");
    CHECK(ts.heating_value.at(SourceKind::coal, 2000) == 21.3);
    CHECK(ts.heating_value.at(SourceKind::coal, 2010) == 20.95);
    CHECK(ts.carbon_content_of(SourceKind::oil) == 20.0);
    CHECK(cfg.find("BP").oxidation_at(SourceKind::coal, 2018) == 1.00);
    CHECK(cfg.find("BP").cement_factor_value() == 0.0855);
    CHECK(cfg.find("custom").oxidation_at(SourceKind::coal, 2018) == 0.95);
    CHECK(cfg.uncertainty.draws == 500);
    CHECK(cfg.uncertainty.seed == 9);
    CHECK(cfg.uncertainty.sigma({InputKind::statistical_error, SourceKind::coal}) == 0.02);
    CHECK(cfg.uncertainty.sigma({InputKind::statistical_error, SourceKind::oil}) == 0.05);
    CHECK(cfg.uncertainty.stock_abs_sigma(SourceKind::coal) == 30e6);
    // defaults survive alongside explicit keys
    CHECK(cfg.uncertainty.sigma({InputKind::carbon_content, SourceKind::coal}) == 0.003);
    try {
        cfg.find("missing");
        FAIL("expected usage error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::usage);
        CHECK(std::string(e.what()).find("unknown scenario") != std::string::npos);
    }
}

TEST_CASE("scenario config errors") {
    CHECK(mentions(config_errors("[this-study]\noxidation.coal = 1.2\n"), "oxidation.coal must lie in (0, 1]"));
    CHECK(mentions(config_errors("[x]\npreset = Nope\n"), "unknown preset reference 'Nope'"));
    CHECK(mentions(config_errors("[mine]\nheating_value.coal = 20\n"), "missing required field carbon_content.coal"));
    CHECK(mentions(config_errors("[this-study]\nheating_value.oil = 41\n"), "missing required field oxidation.oil"));
    CHECK(mentions(config_errors("default = zzz\n[this-study]\ndescription = x\n"), "default scenario 'zzz'"));
    CHECK(mentions(config_errors("[uncertainty]\ndraws = 10\n"), "at least one scenario"));
}

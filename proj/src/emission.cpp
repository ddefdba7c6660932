#include "carbonledger/emission.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace carbonledger {

Quantity fuel_emissions(const ApparentConsumption& ac, const EmissionFactorSet& f) {
    if (ac.source == SourceKind::cement) {
        throw Error(ErrorCode::unsupported_source, "cement has no combustion emissions");
    }
    const double tc = fuel_carbon(ac.energy.magnitude(), f.carbon_content_of(ac.source),
                                  f.oxidation_at(ac.source, ac.period.year));
    return Quantity(carbon_to_co2(tc), Unit::tonne_co2);
}

Quantity cement_emissions(const Quantity& production, const EmissionFactorSet& f) {
    if (production.unit() != Unit::tonne) {
        throw Error(ErrorCode::unit_mismatch, "cement production must be in tonnes");
    }
    if (production.magnitude() < 0.0) {
        throw Error(ErrorCode::domain, "cement production must be nonnegative");
    }
    return Quantity(carbon_to_co2(production.magnitude() * f.cement_factor_value()), Unit::tonne_co2);
}

double EmissionEstimate::share(SourceKind s) const {
    auto it = per_source.find(s);
    if (it == per_source.end() || total.magnitude() == 0.0) return 0.0;
    return it->second.magnitude() / total.magnitude();
}

EmissionEstimate estimate_from_records(int year, const std::map<SourceKind, FlowRecord>& records,
                                       const EmissionFactorSet& f) {
    EmissionEstimate e;
    e.year = year;
    e.scenario_name = f.scenario_name;
    double total = 0.0;
    for (const auto& [source, rec] : records) {
        Quantity co2;
        if (source == SourceKind::cement) {
            co2 = cement_emissions(rec.production, f);
        } else {
            const auto ac = apparent_consumption(rec, f.heating_value);
            co2 = fuel_emissions(ac, f);
            e.energy.emplace(source, ac.energy);
            if (ac.anomalous) e.anomalous.push_back(source);
        }
        total += co2.magnitude();
        e.per_source.emplace(source, co2);
    }
    e.total = Quantity(total, Unit::tonne_co2);
    return e;
}

std::vector<EmissionEstimate> total_emissions(const Dataset& d, const EmissionFactorSet& f,
                                              int first_year, int last_year) {
    if (first_year > last_year) {
        throw Error(ErrorCode::domain, fmt::format("empty year range {}..{}", first_year, last_year));
    }
    std::vector<SourceKind> sources;
    for (auto s : kAllSources) {
        if (d.has_source(s)) sources.push_back(s);
    }
    if (sources.empty()) throw Error(ErrorCode::missing_data, "dataset has no flow records");

    std::vector<std::string> gaps;
    std::vector<std::map<SourceKind, FlowRecord>> per_year;
    for (int y = first_year; y <= last_year; ++y) {
        std::map<SourceKind, FlowRecord> recs;
        for (auto s : sources) {
            if (auto r = d.aggregate(s, Period::annual(y))) {
                recs.emplace(s, *r);
            } else {
                gaps.push_back(fmt::format("{} {}", to_string(s), y));
            }
        }
        per_year.push_back(std::move(recs));
    }
    if (!gaps.empty()) {
        throw Error(ErrorCode::missing_data,
                    fmt::format("missing annual records: {}", fmt::join(gaps, ", ")));
    }
    std::vector<EmissionEstimate> out;
    for (int y = first_year; y <= last_year; ++y) {
        out.push_back(estimate_from_records(y, per_year[static_cast<std::size_t>(y - first_year)], f));
    }
    return out;
}

EmissionEstimate with_relative_band(EmissionEstimate e, double relative_sigma) {
    const double t = e.total.magnitude();
    const double half = std::abs(t) * relative_sigma;
    e.band = Band{Quantity(t - half, Unit::tonne_co2), Quantity(t + half, Unit::tonne_co2)};
    return e;
}

ScenarioComparison scenario_compare(const Dataset& d, const std::vector<EmissionFactorSet>& scenarios,
                                    const std::string& default_scenario, int first_year, int last_year) {
    if (scenarios.size() < 2) {
        throw Error(ErrorCode::usage, "scenario comparison needs at least 2 scenarios");
    }
    ScenarioComparison out;
    out.default_scenario = default_scenario;

    std::vector<std::optional<std::vector<EmissionEstimate>>> results;
    for (const auto& f : scenarios) {
        try {
            results.emplace_back(total_emissions(d, f, first_year, last_year));
        } catch (const Error& e) {
            results.emplace_back(std::nullopt);
            out.failures.emplace_back(f.scenario_name, e.what());
        }
    }

    const std::vector<EmissionEstimate>* reference = nullptr;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        if (scenarios[i].scenario_name == default_scenario && results[i]) reference = &*results[i];
    }

    auto relate = [](ComparisonRow& row, double ref) {
        if (ref != 0.0) {
            row.ratio_to_default = row.emissions_tco2 / ref;
            row.deviation_percent = 100.0 * (row.emissions_tco2 - ref) / ref;
        }
    };

    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        if (!results[i]) continue;
        for (std::size_t k = 0; k < results[i]->size(); ++k) {
            const auto& est = (*results[i])[k];
            const EmissionEstimate* ref = reference ? &(*reference)[k] : nullptr;
            for (const auto& [source, q] : est.per_source) {
                ComparisonRow row{est.year, est.scenario_name, source, q.magnitude(), {}, {}};
                if (ref) relate(row, ref->per_source.at(source).magnitude());
                out.rows.push_back(row);
            }
            ComparisonRow row{est.year, est.scenario_name, std::nullopt, est.total.magnitude(), {}, {}};
            if (ref) relate(row, ref->total.magnitude());
            out.rows.push_back(row);
        }
    }
    return out;
}

DriverIndicators intensity_indicators(const std::vector<EmissionEstimate>& estimates, const Dataset& d) {
    DriverIndicators out;
    for (const auto& e : estimates) {
        auto g = d.gdp.find(e.year);
        if (g == d.gdp.end()) {
            throw Error(ErrorCode::missing_data, fmt::format("no GDP value for {}", e.year));
        }
        if (!(g->second > 0.0)) {
            throw Error(ErrorCode::domain, fmt::format("GDP for {} must be > 0", e.year));
        }
        DriverIndicatorsYear row;
        row.co2_intensity = e.total.magnitude() / g->second;
        double fuel_energy = 0.0;
        for (const auto& [s, q] : e.energy) fuel_energy += q.magnitude();
        if (auto c = e.energy.find(SourceKind::coal); c != e.energy.end() && fuel_energy > 0.0) {
            row.coal_share_energy = c->second.magnitude() / fuel_energy;
        }
        if (auto s = d.secondary_share.find(e.year); s != d.secondary_share.end()) {
            row.secondary_share = s->second;
        }
        out.emplace(e.year, row);
    }
    return out;
}

}  // namespace carbonledger

#include "carbonledger/uncertainty.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "carbonledger/balance.hpp"
#include "carbonledger/rng.hpp"
#include "carbonledger/stats.hpp"

namespace carbonledger {

YearModel YearModel::build(const Dataset& d, const EmissionFactorSet& f, int year) {
    YearModel m;
    m.year = year;
    m.scenario_name = f.scenario_name;
    m.factors = f;
    std::vector<std::string> gaps;
    for (auto s : kAllSources) {
        if (!d.has_source(s)) continue;
        auto rec = d.aggregate(s, Period::annual(year));
        if (!rec) {
            gaps.push_back(fmt::format("{} {}", to_string(s), year));
            continue;
        }
        if (s == SourceKind::cement) {
            m.cement_production = rec->production.magnitude();
            m.cement_factor = f.cement_factor_value();
        } else {
            m.fuels.push_back(Fuel{*rec, f.heating_value.at(s, year), f.carbon_content_of(s),
                                   f.oxidation_at(s, year)});
        }
    }
    if (!gaps.empty()) {
        throw Error(ErrorCode::missing_data, fmt::format("missing annual records: {}", fmt::join(gaps, ", ")));
    }
    if (m.fuels.empty() && !m.cement_production) {
        throw Error(ErrorCode::missing_data, "dataset has no flow records");
    }
    return m;
}

double YearModel::central() const {
    std::map<SourceKind, FlowRecord> recs;
    for (const auto& fuel : fuels) recs.emplace(fuel.flows.source, fuel.flows);
    if (cement_production) {
        auto c = FlowRecord::zero(Period::annual(year), SourceKind::cement);
        c.production = Quantity(*cement_production, Unit::tonne);
        recs.emplace(SourceKind::cement, c);
    }
    return estimate_from_records(year, recs, factors).total.magnitude();
}

namespace {

/// Per-stream sigmas resolved once per simulation.
struct ShockPlan {
    std::uint64_t seed = 0;
    std::vector<double> sigma;
    std::array<double, 4> stock_abs{};
    std::vector<std::uint32_t> active;

    explicit ShockPlan(const UncertaintySpec& spec) : seed(spec.seed), sigma(all_factor_keys().size(), 0.0) {
        for (const auto& key : all_factor_keys()) {
            sigma[stream_index(key)] = spec.sigma(key);
            if (spec.is_active(key)) active.push_back(static_cast<std::uint32_t>(stream_index(key)));
        }
        for (auto s : kAllSources) stock_abs[static_cast<std::size_t>(s)] = spec.stock_abs_sigma(s);
    }

    DrawShocks shocks(std::uint64_t draw) const {
        const CounterNormal normal(seed);
        DrawShocks z(sigma.size(), 0.0);
        for (auto i : active) z[i] = normal.truncated(draw, i);
        return z;
    }

    /// Multiplier 1 + sigma * z for a relative perturbation.
    double rel(const DrawShocks& z, InputKind kind, SourceKind s) const {
        const auto i = stream_index({kind, s});
        return 1.0 + sigma[i] * z[i];
    }

    double stock(const DrawShocks& z, SourceKind s, double stock) const {
        const auto i = stream_index({InputKind::stock_change, s});
        const double r = sigma[i] * std::abs(stock);
        const double a = stock_abs[static_cast<std::size_t>(s)];
        return stock + std::sqrt(r * r + a * a) * z[i];
    }
};

double evaluate_with_plan(const YearModel& m, const ShockPlan& plan, const DrawShocks& z) {
    double total = 0.0;
    for (const auto& fuel : m.fuels) {
        const auto s = fuel.flows.source;
        const auto& r = fuel.flows;
        const double native =
            apparent_native(r.production.magnitude() * plan.rel(z, InputKind::production, s),
                            r.imports.magnitude() * plan.rel(z, InputKind::import, s),
                            r.exports.magnitude() * plan.rel(z, InputKind::export_, s),
                            plan.stock(z, s, r.stock_change.magnitude()), r.non_energy_use.magnitude()) *
            plan.rel(z, InputKind::statistical_error, s);
        const double energy = native * (fuel.heating_value * plan.rel(z, InputKind::heating_value, s)) / kGJPerTJ;
        const double tc = fuel_carbon(energy, fuel.carbon_content * plan.rel(z, InputKind::carbon_content, s),
                                      fuel.oxidation * plan.rel(z, InputKind::oxidation, s));
        total += carbon_to_co2(tc);
    }
    if (m.cement_production) {
        const auto c = SourceKind::cement;
        total += carbon_to_co2(*m.cement_production * plan.rel(z, InputKind::cement_production, c) *
                               (m.cement_factor * plan.rel(z, InputKind::cement_factor, c)));
    }
    return total;
}

}  // namespace

DrawShocks draw_shocks(const UncertaintySpec& spec, std::uint64_t draw) {
    return ShockPlan(spec).shocks(draw);
}

double evaluate_total(const YearModel& m, const UncertaintySpec& spec, const DrawShocks& z) {
    return evaluate_with_plan(m, ShockPlan(spec), z);
}

std::vector<double> simulate_totals(const YearModel& m, const UncertaintySpec& spec, std::size_t draws,
                                    const ExecutionPolicy& policy) {
    const ShockPlan plan(spec);
    return sample_draws(draws, policy, [&](std::size_t i) { return evaluate_with_plan(m, plan, plan.shocks(i)); });
}

std::vector<double> simulate_totals_reference(const YearModel& m, const UncertaintySpec& spec,
                                              std::size_t draws) {
    const ShockPlan plan(spec);
    auto rel = [&](const DrawShocks& z, InputKind kind, SourceKind s) { return plan.rel(z, kind, s); };
    std::vector<double> out;
    out.reserve(draws);
    for (std::size_t i = 0; i < draws; ++i) {
        const DrawShocks z = plan.shocks(i);
        EmissionFactorSet f = m.factors;
        std::map<SourceKind, FlowRecord> recs;
        for (const auto& fuel : m.fuels) {
            const auto s = fuel.flows.source;
            FlowRecord r = fuel.flows;
            r.production = r.production * rel(z, InputKind::production, s);
            r.imports = r.imports * rel(z, InputKind::import, s);
            r.exports = r.exports * rel(z, InputKind::export_, s);
            r.stock_change = Quantity(plan.stock(z, s, r.stock_change.magnitude()), r.stock_change.unit());
            // A common factor on every balance term scales apparent consumption.
            const double k = rel(z, InputKind::statistical_error, s);
            r.production = r.production * k;
            r.imports = r.imports * k;
            r.exports = r.exports * k;
            r.stock_change = r.stock_change * k;
            r.non_energy_use = r.non_energy_use * k;
            recs.emplace(s, r);

            f.heating_value.set(s, YearSeries(fuel.heating_value * rel(z, InputKind::heating_value, s)));
            f.carbon_content[s] = fuel.carbon_content * rel(z, InputKind::carbon_content, s);
            f.oxidation[s] = YearSeries(fuel.oxidation * rel(z, InputKind::oxidation, s));
        }
        if (m.cement_production) {
            const auto c = SourceKind::cement;
            auto r = FlowRecord::zero(Period::annual(m.year), c);
            r.production = Quantity(*m.cement_production * rel(z, InputKind::cement_production, c), Unit::tonne);
            recs.emplace(c, r);
            f.cement_factor = m.cement_factor * rel(z, InputKind::cement_factor, c);
        }
        out.push_back(estimate_from_records(m.year, recs, f).total.magnitude());
    }
    return out;
}

Band percentile_band(std::vector<double> totals) {
    std::sort(totals.begin(), totals.end());
    return Band{Quantity(stats::quantile_sorted(totals, stats::kBandLowerP), Unit::tonne_co2),
                Quantity(stats::quantile_sorted(totals, stats::kBandUpperP), Unit::tonne_co2)};
}

UncertaintyResult monte_carlo_band(const Dataset& d, const EmissionFactorSet& f, int year,
                                   const UncertaintySpec& spec, const ExecutionPolicy& policy) {
    if (auto problems = spec.check(); !problems.empty()) throw ValidationError(std::move(problems));
    const YearModel m = YearModel::build(d, f, year);

    UncertaintyResult r;
    r.year = year;
    r.scenario_name = f.scenario_name;
    r.central = Quantity(m.central(), Unit::tonne_co2);
    r.seed = spec.seed;
    if (spec.draws < kMinBandDraws) return r;

    r.draws_used = spec.draws;
    if (spec.active_factors().empty()) {
        r.band = Band{r.central, r.central};
        return r;
    }
    r.band = percentile_band(simulate_totals(m, spec, spec.draws, policy));
    return r;
}

std::vector<Contribution> contribution_decomposition(const YearModel& m, const UncertaintySpec& spec,
                                                     const ExecutionPolicy& policy) {
    std::vector<Contribution> out;
    double sum = 0.0;
    for (const auto& key : spec.active_factors()) {
        const auto totals = simulate_totals(m, spec.only(key), spec.draws, policy);
        const double var = totals.size() >= 2 ? stats::sample_variance(totals) : 0.0;
        out.push_back({key, var, 0.0});
        sum += var;
    }
    if (!(sum > 0.0)) {
        throw Error(ErrorCode::undefined_contributions,
                    "contributions undefined: no uncertain input produces variance");
    }
    for (auto& c : out) c.percent = 100.0 * c.variance / sum;
    std::stable_sort(out.begin(), out.end(),
                     [](const Contribution& a, const Contribution& b) { return a.percent > b.percent; });
    return out;
}

std::vector<Contribution> contribution_decomposition(const Dataset& d, const EmissionFactorSet& f, int year,
                                                     const UncertaintySpec& spec,
                                                     const ExecutionPolicy& policy) {
    if (auto problems = spec.check(); !problems.empty()) throw ValidationError(std::move(problems));
    if (spec.draws < kMinBandDraws) {
        throw Error(ErrorCode::domain, fmt::format("contributions need at least {} draws", kMinBandDraws));
    }
    return contribution_decomposition(YearModel::build(d, f, year), spec, policy);
}

double stock_change_sigma(std::span<const double> annual_stock_changes) {
    if (annual_stock_changes.size() < 3) {
        throw Error(ErrorCode::insufficient_data,
                    fmt::format("stock-change sigma needs at least 3 annual values, got {}",
                                annual_stock_changes.size()));
    }
    return stats::sample_sd(annual_stock_changes);
}

std::vector<double> stock_change_history(const Dataset& d, SourceKind source, int first, int last) {
    std::vector<double> out;
    for (int y = first; y <= last; ++y) {
        if (auto r = d.aggregate(source, Period::annual(y))) out.push_back(r->stock_change.magnitude());
    }
    return out;
}

}  // namespace carbonledger

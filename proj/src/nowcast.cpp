#include "carbonledger/nowcast.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "carbonledger/balance.hpp"
#include "carbonledger/rng.hpp"
#include "carbonledger/stats.hpp"
#include "carbonledger/uncertainty.hpp"

namespace carbonledger {

namespace {

// Random streams used by the projection, disjoint from the per-factor
// streams of the emission Monte Carlo.
constexpr std::uint32_t kFlowStreamBase = 1000;
constexpr std::uint32_t kCombineStreamBase = 2000;

std::uint32_t flow_stream(SourceKind s, std::uint32_t slot) {
    return kFlowStreamBase + 16 * static_cast<std::uint32_t>(s) + slot;
}

double flow_value(const FlowRecord& r, FlowKind k) {
    switch (k) {
        case FlowKind::production: return r.production.magnitude();
        case FlowKind::import: return r.imports.magnitude();
        case FlowKind::export_: return r.exports.magnitude();
    }
    return 0.0;
}

std::optional<double> full_year_value(const Dataset& d, SourceKind s, int year, FlowKind k) {
    if (auto r = d.aggregate(s, Period::annual(year))) return flow_value(*r, k);
    if (d.monthly_prefix(s, year) == 12) return flow_value(cumulative_months(d, s, year, 12), k);
    return std::nullopt;
}

std::optional<double> first_n_value(const Dataset& d, SourceKind s, int year, int n, FlowKind k) {
    if (d.monthly_prefix(s, year) < n) return std::nullopt;
    return flow_value(cumulative_months(d, s, year, n), k);
}

int earliest_year(const Dataset& d) {
    return d.flows.empty() ? 0 : d.flows.begin()->first.period.year;
}

}  // namespace

std::string_view to_string(FlowKind kind) {
    switch (kind) {
        case FlowKind::production: return "production";
        case FlowKind::import: return "import";
        case FlowKind::export_: return "export";
    }
    return "?";
}

PartialYearModel fit_partial_year_model(std::span<const GrowthPair> pairs) {
    if (pairs.size() < 3) {
        throw Error(ErrorCode::insufficient_data,
                    fmt::format("regression needs at least 3 pairs, got {}", pairs.size()));
    }
    const double n = static_cast<double>(pairs.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : pairs) {
        mx += p.first_n;
        my += p.full;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : pairs) {
        sxx += (p.first_n - mx) * (p.first_n - mx);
        sxy += (p.first_n - mx) * (p.full - my);
        syy += (p.full - my) * (p.full - my);
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::domain, "regression x-values have zero variance");

    PartialYearModel m;
    m.n = pairs.size();
    m.slope = sxy / sxx;
    m.intercept = my - m.slope * mx;
    m.mean_x = mx;
    m.sxx = sxx;
    double sse = 0.0;
    for (const auto& p : pairs) {
        const double r = p.full - (m.intercept + m.slope * p.first_n);
        sse += r * r;
    }
    m.residual_se = std::sqrt(sse / (n - 2.0));
    m.r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    return m;
}

Interval project_full_year(const PartialYearModel& model, double first_n_growth, double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw Error(ErrorCode::domain, fmt::format("interval level {} outside (0, 1)", level));
    }
    if (model.n < 3 || !(model.sxx > 0.0)) throw Error(ErrorCode::domain, "invalid regression model");
    const double central = model.intercept + model.slope * first_n_growth;
    const double n = static_cast<double>(model.n);
    const double dx = first_n_growth - model.mean_x;
    const double t = stats::student_t_quantile(0.5 * (1.0 + level), n - 2.0);
    const double half = t * model.residual_se * std::sqrt(1.0 + 1.0 / n + dx * dx / model.sxx);
    return {central, central - half, central + half};
}

std::vector<GrowthPair> growth_pairs(const Dataset& d, SourceKind source, FlowKind flow, int first_year,
                                     int last_year, int n_months) {
    std::vector<GrowthPair> out;
    for (int y = first_year; y <= last_year; ++y) {
        const auto x0 = first_n_value(d, source, y - 1, n_months, flow);
        const auto x1 = first_n_value(d, source, y, n_months, flow);
        const auto f0 = full_year_value(d, source, y - 1, flow);
        const auto f1 = full_year_value(d, source, y, flow);
        if (!x0 || !x1 || !f0 || !f1 || !(*x0 > 0.0) || !(*f0 > 0.0)) continue;
        out.push_back({growth_percent(*x0, *x1), growth_percent(*f0, *f1), y});
    }
    return out;
}

double stock_projection_sigma(const Dataset& d, SourceKind source, int target_year, int window) {
    const auto history = stock_change_history(d, source, target_year - window, target_year - 1);
    return stock_change_sigma(history);
}

SourceProjection project_source(const Dataset& d, const EmissionFactorSet& f, SourceKind source,
                                const NowcastOptions& opt, std::optional<double> stock_sigma) {
    if (opt.months < 1 || opt.months > 11) {
        throw Error(ErrorCode::domain, fmt::format("basis months {} outside [1, 11]", opt.months));
    }
    const int T = opt.year;
    const auto prior = d.aggregate(source, Period::annual(T - 1));
    if (!prior) {
        throw Error(ErrorCode::missing_data,
                    fmt::format("no annual record for {} {}", to_string(source), T - 1));
    }

    SourceProjection out;
    out.growth.source = source;
    const std::vector<FlowKind> kinds =
        is_fuel(source) ? std::vector<FlowKind>(kAllFlowKinds.begin(), kAllFlowKinds.end())
                        : std::vector<FlowKind>{FlowKind::production};

    std::map<FlowKind, double> sd;
    for (auto k : kinds) {
        if (flow_value(*prior, k) == 0.0) continue;
        std::vector<GrowthPair> pairs;
        if (opt.pooling == Pooling::pooled_fuels && is_fuel(source)) {
            for (auto s : kFuelSources) {
                auto p = growth_pairs(d, s, k, earliest_year(d) + 1, T - 1, opt.months);
                pairs.insert(pairs.end(), p.begin(), p.end());
            }
        } else {
            pairs = growth_pairs(d, source, k, earliest_year(d) + 1, T - 1, opt.months);
        }
        PartialYearModel model;
        try {
            model = fit_partial_year_model(pairs);
        } catch (const Error& e) {
            throw Error(e.code(), fmt::format("{} {}: {}", to_string(source), to_string(k), e.what()));
        }
        model.source = opt.pooling == Pooling::pooled_fuels && is_fuel(source) ? std::nullopt
                                                                               : std::optional(source);
        model.flow = k;
        const double x = growth_percent(flow_value(cumulative_months(d, source, T - 1, opt.months), k),
                                        flow_value(cumulative_months(d, source, T, opt.months), k));
        const Interval iv = project_full_year(model, x, opt.level);
        out.models.emplace(k, model);
        out.flow_growth.emplace(k, iv);
        sd.emplace(k, stats::sigma_from_half_width(iv.half_width()));
    }

    if (is_fuel(source)) {
        out.stock_sigma = stock_sigma ? *stock_sigma : stock_projection_sigma(d, source, T, opt.stock_window);
    }

    std::map<SourceKind, FlowRecord> prior_only{{source, *prior}};
    out.prior_emissions = estimate_from_records(T - 1, prior_only, f).total.magnitude();

    const double supply_prior = prior->production.magnitude() + prior->imports.magnitude() -
                                prior->exports.magnitude();
    auto growth_for = [&](const std::map<FlowKind, double>& g, double stock) {
        FlowRecord r = *prior;
        r.period = Period::annual(T);
        auto grown = [&](const Quantity& q, FlowKind k) {
            auto it = g.find(k);
            return it == g.end() ? q : q * (1.0 + it->second / 100.0);
        };
        r.production = grown(prior->production, FlowKind::production);
        r.imports = grown(prior->imports, FlowKind::import);
        r.exports = grown(prior->exports, FlowKind::export_);
        r.stock_change = Quantity(stock, native_unit(source));
        if (is_fuel(source) && supply_prior > 0.0) {
            const double supply = r.production.magnitude() + r.imports.magnitude() - r.exports.magnitude();
            r.non_energy_use = prior->non_energy_use * (supply / supply_prior);
        }
        std::map<SourceKind, FlowRecord> recs{{source, r}};
        return growth_percent(out.prior_emissions, estimate_from_records(T, recs, f).total.magnitude());
    };

    std::map<FlowKind, double> central_g;
    for (const auto& [k, iv] : out.flow_growth) central_g.emplace(k, iv.central);
    out.growth.central = growth_for(central_g, prior->stock_change.magnitude());

    const bool uncertain =
        out.stock_sigma > 0.0 || std::any_of(sd.begin(), sd.end(), [](const auto& kv) { return kv.second > 0.0; });
    if (!uncertain) {
        out.growth.lo68 = out.growth.hi68 = out.growth.central;
        return out;
    }
    if (opt.draws < kMinBandDraws) {
        throw Error(ErrorCode::domain, fmt::format("projection needs at least {} draws", kMinBandDraws));
    }
    const CounterNormal normal(opt.seed);
    auto draws = sample_draws(opt.draws, opt.policy, [&](std::size_t i) {
        std::map<FlowKind, double> g;
        for (const auto& [k, c] : central_g) {
            const double s = sd.at(k);
            g.emplace(k, s > 0.0 ? c + s * normal.truncated(i, flow_stream(source, static_cast<std::uint32_t>(k)))
                                 : c);
        }
        double stock = prior->stock_change.magnitude();
        if (out.stock_sigma > 0.0) stock += out.stock_sigma * normal.truncated(i, flow_stream(source, 3));
        return growth_for(g, stock);
    });
    std::sort(draws.begin(), draws.end());
    out.growth.lo68 = stats::quantile_sorted(draws, stats::kBandLowerP);
    out.growth.hi68 = stats::quantile_sorted(draws, stats::kBandUpperP);
    return out;
}

GrowthProjection combine_total_growth(const std::vector<SourceGrowth>& per_source,
                                      const EmissionEstimate& prior_year, const UncertaintySpec& spec,
                                      const ExecutionPolicy& policy) {
    const double total = prior_year.total.magnitude();
    if (!(total > 0.0)) throw Error(ErrorCode::domain, "prior-year total emissions must be > 0");

    std::vector<std::pair<SourceGrowth, double>> parts;
    double share_sum = 0.0;
    for (const auto& [s, q] : prior_year.per_source) {
        if (q.magnitude() < 0.0) {
            throw Error(ErrorCode::domain, fmt::format("prior-year {} emissions are negative", to_string(s)));
        }
        auto it = std::find_if(per_source.begin(), per_source.end(),
                               [&](const SourceGrowth& g) { return g.source == s; });
        if (it == per_source.end()) {
            throw Error(ErrorCode::missing_data, fmt::format("no growth projection for {}", to_string(s)));
        }
        const double w = q.magnitude() / total;
        share_sum += w;
        parts.emplace_back(*it, w);
    }
    for (const auto& g : per_source) {
        if (!prior_year.per_source.contains(g.source)) {
            throw Error(ErrorCode::missing_data,
                        fmt::format("projection for {} has no prior-year emissions", to_string(g.source)));
        }
    }
    if (std::abs(share_sum - 1.0) > 1e-6) {
        throw Error(ErrorCode::domain, fmt::format("emission shares sum to {}, not 1", share_sum));
    }

    GrowthProjection out;
    out.year = prior_year.year + 1;
    out.per_source = per_source;
    double central = 0.0;
    for (const auto& [g, w] : parts) central += w * g.central;
    out.total.central = central;

    const bool uncertain = std::any_of(parts.begin(), parts.end(),
                                       [](const auto& p) { return p.first.hi68 > p.first.lo68; });
    if (!uncertain) {
        out.total.lo68 = out.total.hi68 = central;
        return out;
    }
    if (spec.draws < kMinBandDraws) {
        throw Error(ErrorCode::domain, fmt::format("combination needs at least {} draws", kMinBandDraws));
    }
    const CounterNormal normal(spec.seed);
    auto draws = sample_draws(spec.draws, policy, [&](std::size_t i) {
        double t = 0.0;
        for (const auto& [g, w] : parts) {
            const double sd = stats::sigma_from_half_width(0.5 * (g.hi68 - g.lo68));
            const double z =
                sd > 0.0 ? normal.truncated(i, kCombineStreamBase + static_cast<std::uint32_t>(g.source)) : 0.0;
            t += w * (g.central + sd * z);
        }
        return t;
    });
    std::sort(draws.begin(), draws.end());
    out.total.lo68 = stats::quantile_sorted(draws, stats::kBandLowerP);
    out.total.hi68 = stats::quantile_sorted(draws, stats::kBandUpperP);
    return out;
}

NowcastResult nowcast(const Dataset& d, const EmissionFactorSet& f, const NowcastOptions& opt) {
    NowcastResult out;
    std::map<SourceKind, FlowRecord> prior;
    std::vector<SourceGrowth> growths;
    for (auto s : kAllSources) {
        if (!d.has_source(s)) continue;
        out.sources.push_back(project_source(d, f, s, opt));
        growths.push_back(out.sources.back().growth);
        prior.emplace(s, *d.aggregate(s, Period::annual(opt.year - 1)));
    }
    if (out.sources.empty()) throw Error(ErrorCode::missing_data, "dataset has no flow records");
    out.prior_year = estimate_from_records(opt.year - 1, prior, f);

    UncertaintySpec spec;
    spec.draws = opt.draws;
    spec.seed = opt.seed;
    out.projection = combine_total_growth(growths, out.prior_year, spec, opt.policy);
    out.projection.year = opt.year;
    out.projection.basis_months = opt.months;
    return out;
}

std::string format_growth(double central, double lo, double hi) {
    return fmt::format("{:+.1f}% (range: {:.1f}% to {:.1f}%)", central, lo, hi);
}

}  // namespace carbonledger

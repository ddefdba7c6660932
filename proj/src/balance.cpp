#include "carbonledger/balance.hpp"

#include <fmt/format.h>

namespace carbonledger {

ApparentConsumption apparent_consumption(const FlowRecord& r, const HeatingValueSeries& hv) {
    if (r.source == SourceKind::cement) {
        throw Error(ErrorCode::unsupported_source, "cement does not enter the fuel mass balance");
    }
    const double native = apparent_native(r.production.magnitude(), r.imports.magnitude(),
                                          r.exports.magnitude(), r.stock_change.magnitude(),
                                          r.non_energy_use.magnitude());
    const Quantity q(native, native_unit(r.source));
    return ApparentConsumption{r.source, r.period, q, convert_unit(q, r.source, r.period.year, hv),
                               native < 0.0};
}

std::vector<ApparentConsumption> apparent_consumption_all(std::span<const FlowRecord> records,
                                                          const HeatingValueSeries& hv,
                                                          const ExecutionPolicy& policy) {
    std::vector<ApparentConsumption> out(records.size());
    for_each_index(records.size(), policy,
                   [&](std::size_t i) { out[i] = apparent_consumption(records[i], hv); });
    return out;
}

double growth_percent(double base, double value) {
    if (!(base > 0.0)) {
        throw Error(ErrorCode::domain, fmt::format("growth undefined for nonpositive base {}", base));
    }
    return 100.0 * (value - base) / base;
}

GrowthRate yoy_growth(const std::map<Period, Quantity>& series, const Period& at) {
    const Period base = at.previous_year();
    auto cur = series.find(at);
    auto prev = series.find(base);
    if (cur == series.end()) {
        throw Error(ErrorCode::missing_data, fmt::format("no value for {}", to_string(at)));
    }
    if (prev == series.end()) {
        throw Error(ErrorCode::missing_data, fmt::format("no predecessor {} for {}", to_string(base), to_string(at)));
    }
    if (cur->second.unit() != prev->second.unit()) {
        throw Error(ErrorCode::unit_mismatch, "growth between different units");
    }
    return GrowthRate{base, at, growth_percent(prev->second.magnitude(), cur->second.magnitude())};
}

GrowthRate driver_growth(const Dataset& d, const std::string& product, int year, int n_months) {
    const double prev = cumulative_product(d, product, year - 1, n_months);
    const double cur = cumulative_product(d, product, year, n_months);
    return GrowthRate{Period::monthly(year - 1, n_months), Period::monthly(year, n_months),
                      growth_percent(prev, cur)};
}

}  // namespace carbonledger

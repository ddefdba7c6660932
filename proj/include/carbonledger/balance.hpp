#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "carbonledger/domain.hpp"
#include "carbonledger/ingest.hpp"
#include "carbonledger/kernels.hpp"

namespace carbonledger {

/// Mass-balance result for one fuel and period. A negative native amount is
/// kept as is and flagged rather than clamped.
struct ApparentConsumption {
    SourceKind source = SourceKind::coal;
    Period period;
    Quantity native;
    Quantity energy;
    bool anomalous = false;
};

/// production + imports - exports - stock_change - non_energy_use
inline double apparent_native(double production, double imports, double exports,
                              double stock_change, double non_energy_use) {
    return production + imports - exports - stock_change - non_energy_use;
}

/// Monthly records use the heating value of their calendar year.
ApparentConsumption apparent_consumption(const FlowRecord& r, const HeatingValueSeries& hv);

/// Batch form over many records; parallel and serial modes give identical
/// results.
std::vector<ApparentConsumption> apparent_consumption_all(std::span<const FlowRecord> records,
                                                          const HeatingValueSeries& hv,
                                                          const ExecutionPolicy& policy = {});

struct GrowthRate {
    Period base;
    Period at;
    double percent = 0.0;
};

/// 100 * (value - base) / base; throws Error(domain) unless base > 0.
double growth_percent(double base, double value);

/// Year-on-year growth against the same month index one year earlier.
GrowthRate yoy_growth(const std::map<Period, Quantity>& series, const Period& at);

/// Growth of a product's first-n-months output versus the same months of the
/// previous year.
GrowthRate driver_growth(const Dataset& d, const std::string& product, int year, int n_months);

}  // namespace carbonledger

#pragma once

// Partial-year to full-year growth projection.
//
// For each source and flow (production, import, export) an OLS line maps
// the year-on-year growth of the first-n-months cumulative flow onto the
// full-year growth, using every historical year with complete data. The
// target year's first-n-months growth is pushed through that line with a
// Student-t prediction interval. Projected flows (prior-year values grown
// by the projected rates) go back through the mass balance and emission
// factors; the stock change is held at its prior-year value with a one-sigma
// equal to the sample SD of recent annual stock changes. Non-energy use
// keeps its prior-year share of supply.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carbonledger/domain.hpp"
#include "carbonledger/emission.hpp"
#include "carbonledger/ingest.hpp"
#include "carbonledger/kernels.hpp"
#include "carbonledger/uncertainty_spec.hpp"

namespace carbonledger {

enum class FlowKind { production, import, export_ };

inline constexpr std::array<FlowKind, 3> kAllFlowKinds{FlowKind::production, FlowKind::import,
                                                       FlowKind::export_};
std::string_view to_string(FlowKind kind);

/// One historical year: growth (percent) over the first n months and over
/// the whole year.
struct GrowthPair {
    double first_n = 0.0;
    double full = 0.0;
    int year = 0;
};

struct PartialYearModel {
    std::optional<SourceKind> source;  // empty when pooled across fuels
    FlowKind flow = FlowKind::production;
    std::size_t n = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double residual_se = 0.0;
    double r2 = 0.0;
    double mean_x = 0.0;
    double sxx = 0.0;
};

/// OLS full = intercept + slope * first_n. Throws Error(insufficient_data)
/// for fewer than 3 pairs and Error(domain) when every x is equal.
PartialYearModel fit_partial_year_model(std::span<const GrowthPair> pairs);

struct Interval {
    double central = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    double half_width() const { return 0.5 * (hi - lo); }
};

/// Prediction at `first_n_growth` with a two-sided `level` interval.
Interval project_full_year(const PartialYearModel& model, double first_n_growth, double level = 0.68);

/// Historical pairs for one (source, flow): every year y in
/// [first_year, last_year] where both y and y - 1 have the first n months
/// and a full-year value, and both bases are positive.
std::vector<GrowthPair> growth_pairs(const Dataset& d, SourceKind source, FlowKind flow, int first_year,
                                     int last_year, int n_months);

enum class Pooling { per_source, pooled_fuels };

struct NowcastOptions {
    int year = 0;
    int months = 10;
    double level = 0.68;
    Pooling pooling = Pooling::per_source;
    /// Number of annual stock-change values, ending the year before target.
    int stock_window = 18;
    std::size_t draws = 10'000;
    std::uint64_t seed = 0;
    ExecutionPolicy policy{};
};

/// Growth of one source's emissions (percent) with its one-sigma range.
struct SourceGrowth {
    SourceKind source = SourceKind::coal;
    double central = 0.0;
    double lo68 = 0.0;
    double hi68 = 0.0;
};

/// Per-source projection detail.
struct SourceProjection {
    SourceGrowth growth;
    std::map<FlowKind, PartialYearModel> models;
    std::map<FlowKind, Interval> flow_growth;
    double stock_sigma = 0.0;  // native units
    double prior_emissions = 0.0;  // tCO2
};

/// Absolute stock-change sigma for projecting `target_year`.
double stock_projection_sigma(const Dataset& d, SourceKind source, int target_year, int window = 18);

/// Projects one source. `stock_sigma` overrides the history-derived sigma
/// when given.
SourceProjection project_source(const Dataset& d, const EmissionFactorSet& f, SourceKind source,
                                const NowcastOptions& opt, std::optional<double> stock_sigma = std::nullopt);

struct GrowthProjection {
    int year = 0;
    int basis_months = 10;
    std::vector<SourceGrowth> per_source;
    SourceGrowth total;  // `source` is meaningless here
};

/// Share-weighted total growth. Shares come from the prior year's
/// per-source emissions; the interval comes from independent normal draws
/// of each source's growth matched to its 68% range.
GrowthProjection combine_total_growth(const std::vector<SourceGrowth>& per_source,
                                      const EmissionEstimate& prior_year, const UncertaintySpec& spec,
                                      const ExecutionPolicy& policy = {});

struct NowcastResult {
    GrowthProjection projection;
    std::vector<SourceProjection> sources;
    EmissionEstimate prior_year;
};

/// Full pipeline over every source present in the dataset.
NowcastResult nowcast(const Dataset& d, const EmissionFactorSet& f, const NowcastOptions& opt);

/// "+5.5% (range: 2.5% to 8.5%)"
std::string format_growth(double central, double lo, double hi);

}  // namespace carbonledger

#pragma once

// Monte Carlo propagation of input uncertainty to a year's total emissions.
//
// Every uncertain input gets an independent truncated-normal relative
// perturbation per draw; z for (draw, factor) comes from CounterNormal with
// stream = stream_index(factor), so a draw's inputs are fixed by the seed
// alone. Stock change is perturbed additively with sigma
// sqrt((rel * |stock|)^2 + abs^2); "statistical_error" scales the apparent
// consumption itself.

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

/// Flattened inputs of one (dataset, scenario, year) evaluation.
struct YearModel {
    struct Fuel {
        FlowRecord flows;
        double heating_value = 0.0;  // GJ per native unit
        double carbon_content = 0.0;
        double oxidation = 0.0;
    };

    int year = 0;
    std::string scenario_name;
    std::vector<Fuel> fuels;  // canonical source order
    std::optional<double> cement_production;
    double cement_factor = 0.0;
    /// The scenario, kept for the typed reference path.
    EmissionFactorSet factors;

    static YearModel build(const Dataset& d, const EmissionFactorSet& f, int year);

    /// Unperturbed total via the typed emission path, tCO2.
    double central() const;
};

/// z-values for one draw, indexed by stream_index(FactorKey).
using DrawShocks = std::vector<double>;
DrawShocks draw_shocks(const UncertaintySpec& spec, std::uint64_t draw);

/// Total tCO2 for one set of shocks (fast scalar path).
double evaluate_total(const YearModel& m, const UncertaintySpec& spec, const DrawShocks& z);

/// Kernel: totals for draws [0, draws). Serial and parallel policies give
/// bit-identical vectors.
std::vector<double> simulate_totals(const YearModel& m, const UncertaintySpec& spec, std::size_t draws,
                                    const ExecutionPolicy& policy = {});

/// Serial reference: rebuilds perturbed FlowRecords and factor sets and runs
/// them through estimate_from_records. Slow; for tests and benchmarks.
std::vector<double> simulate_totals_reference(const YearModel& m, const UncertaintySpec& spec,
                                              std::size_t draws);

struct Contribution {
    FactorKey key;
    double variance = 0.0;  // tCO2^2
    double percent = 0.0;
};

struct UncertaintyResult {
    int year = 0;
    std::string scenario_name;
    Quantity central{0.0, Unit::tonne_co2};
    /// 16th/84th percentiles; absent when draws < kMinBandDraws.
    std::optional<Band> band;
    std::size_t draws_used = 0;
    std::uint64_t seed = 0;
    std::vector<Contribution> contributions;
};

UncertaintyResult monte_carlo_band(const Dataset& d, const EmissionFactorSet& f, int year,
                                   const UncertaintySpec& spec, const ExecutionPolicy& policy = {});

/// One-at-a-time variance attribution, descending by share. Throws
/// Error(undefined_contributions) when no input carries variance.
std::vector<Contribution> contribution_decomposition(const Dataset& d, const EmissionFactorSet& f, int year,
                                                     const UncertaintySpec& spec,
                                                     const ExecutionPolicy& policy = {});
std::vector<Contribution> contribution_decomposition(const YearModel& m, const UncertaintySpec& spec,
                                                     const ExecutionPolicy& policy = {});

/// Band from a vector of draws (sorted internally).
Band percentile_band(std::vector<double> totals);

/// Sample standard deviation of an annual stock-change series (native
/// units). Throws Error(insufficient_data) for fewer than 3 values.
double stock_change_sigma(std::span<const double> annual_stock_changes);

/// Annual stock changes of a source for the years in [first, last] that
/// have a record.
std::vector<double> stock_change_history(const Dataset& d, SourceKind source, int first, int last);

}  // namespace carbonledger

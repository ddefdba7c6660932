#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carbonledger/balance.hpp"
#include "carbonledger/domain.hpp"
#include "carbonledger/ingest.hpp"

namespace carbonledger {

/// Energy (TJ) x carbon content (tC/TJ) x oxidation fraction, in tC.
inline double fuel_carbon(double energy_tj, double carbon_content, double oxidation) {
    return energy_tj * carbon_content * oxidation;
}

/// Combustion CO2 for one fuel's apparent consumption.
Quantity fuel_emissions(const ApparentConsumption& ac, const EmissionFactorSet& f);

/// Process CO2 from cement production; the factor is tC per tonne.
Quantity cement_emissions(const Quantity& production, const EmissionFactorSet& f);

struct Band {
    Quantity lo;
    Quantity hi;
};

struct EmissionEstimate {
    int year = 0;
    std::string scenario_name;
    std::map<SourceKind, Quantity> per_source;  // tCO2
    std::map<SourceKind, Quantity> energy;      // TJ, fuels only
    Quantity total{0.0, Unit::tonne_co2};
    std::optional<Band> band;
    /// Fuels whose apparent consumption came out negative.
    std::vector<SourceKind> anomalous;

    double share(SourceKind s) const;
};

/// Emission estimates for every year in [first_year, last_year], summing
/// the fuels and cement present anywhere in the dataset. Throws
/// Error(missing_data) listing every absent (source, year).
std::vector<EmissionEstimate> total_emissions(const Dataset& d, const EmissionFactorSet& f,
                                              int first_year, int last_year);

/// Single year against an explicit flow record per source.
EmissionEstimate estimate_from_records(int year, const std::map<SourceKind, FlowRecord>& records,
                                       const EmissionFactorSet& f);

/// Attaches a symmetric relative one-sigma band to the total.
EmissionEstimate with_relative_band(EmissionEstimate e, double relative_sigma);

/// One line of a scenario comparison. `source` is empty for the total.
struct ComparisonRow {
    int year = 0;
    std::string scenario;
    std::optional<SourceKind> source;
    double emissions_tco2 = 0.0;
    /// Against the default scenario's value for the same year and source.
    std::optional<double> ratio_to_default;
    std::optional<double> deviation_percent;
};

struct ScenarioComparison {
    std::string default_scenario;
    std::vector<ComparisonRow> rows;
    /// Scenarios that failed, with their error message.
    std::vector<std::pair<std::string, std::string>> failures;
};

/// Rows are ordered by scenario (declared order), then year, then source.
/// A failing scenario is reported in `failures` without stopping the rest.
ScenarioComparison scenario_compare(const Dataset& d, const std::vector<EmissionFactorSet>& scenarios,
                                    const std::string& default_scenario, int first_year, int last_year);

struct DriverIndicatorsYear {
    double co2_intensity = 0.0;      // tCO2 per GDP index unit
    double coal_share_energy = 0.0;  // fraction of fuel energy
    std::optional<double> secondary_share;
};

using DriverIndicators = std::map<int, DriverIndicatorsYear>;

DriverIndicators intensity_indicators(const std::vector<EmissionEstimate>& estimates, const Dataset& d);

}  // namespace carbonledger

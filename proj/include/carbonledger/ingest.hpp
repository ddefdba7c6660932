#pragma once

// Loading of flow statistics, auxiliary series and scenario configuration.
//
// File units: coal, oil and cement flows are in 10^6 t; natural gas in
// 10^9 m3. Values are rescaled to base units on read by shifting the decimal
// exponent of the text, so a parse/serialize/parse cycle is exact.
//
// Monthly rows hold that month's flow, not a running total.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "carbonledger/domain.hpp"
#include "carbonledger/uncertainty_spec.hpp"

namespace carbonledger {

struct FlowKey {
    Period period;
    SourceKind source = SourceKind::coal;
    std::string sector = "national";

    friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
    friend bool operator==(const FlowKey&, const FlowKey&) = default;
};

struct ProductKey {
    std::string product;
    Period period;

    friend auto operator<=>(const ProductKey&, const ProductKey&) = default;
    friend bool operator==(const ProductKey&, const ProductKey&) = default;
};

/// One restated record: a later file replaced an earlier value.
struct AuditEntry {
    std::string origin;
    std::string key;
    std::string message;
};

struct Dataset {
    std::map<FlowKey, FlowRecord> flows;
    std::map<int, double> gdp;
    std::map<int, double> secondary_share;
    std::map<ProductKey, double> industrial_products;
    std::vector<AuditEntry> audit;

    /// Throws Error(duplicate_key) if the key already exists.
    void insert(const FlowRecord& r);

    /// Folds a later fragment in; later values win and each replacement is
    /// recorded in `audit`.
    void merge(const Dataset& later, const std::string& origin);

    /// Sum over all sectors for one (period, source); nullopt if none exist.
    std::optional<FlowRecord> aggregate(SourceKind source, const Period& period) const;
    /// Years with at least one annual record for the source.
    std::vector<int> annual_years(SourceKind source) const;
    /// Highest m such that months 1..m all exist for (year, source).
    int monthly_prefix(SourceKind source, int year) const;
    bool has_source(SourceKind source) const;

    /// Structural invariants: contiguous monthly prefixes, gdp > 0,
    /// shares in [0, 1].
    std::vector<std::string> check_invariants() const;

    friend bool operator==(const Dataset& a, const Dataset& b) {
        return a.flows == b.flows && a.gdp == b.gdp && a.secondary_share == b.secondary_share &&
               a.industrial_products == b.industrial_products;
    }
};

/// Decimal shift from base units to file units for a source (6 or 9).
int file_unit_exponent(SourceKind source);

Dataset parse_flows_csv(std::istream& in, const std::string& origin = "<flows>",
                        YearWindow window = {});
Dataset load_flows_file(const std::filesystem::path& path, YearWindow window = {});
/// Canonical ordering, always with the sector column.
void write_flows_csv(const Dataset& d, std::ostream& out);

/// `year,gdp_index,secondary_share`; the share column may be blank.
Dataset parse_gdp_csv(std::istream& in, const std::string& origin = "<gdp>");
/// `year,month,product,output`; blank month means annual.
Dataset parse_products_csv(std::istream& in, const std::string& origin = "<products>");

/// Loads files in argument order, merging with last-write-wins, then checks
/// dataset invariants. Throws ParseError on any problem.
Dataset load_dataset(const std::vector<std::filesystem::path>& flow_files,
                     const std::optional<std::filesystem::path>& gdp_file = std::nullopt,
                     const std::optional<std::filesystem::path>& products_file = std::nullopt);

/// Field-wise sum of months 1..n for (year, source) across sectors. The
/// result's period is (year, n). Throws Error(incomplete_prefix) naming the
/// missing months.
FlowRecord cumulative_months(const Dataset& d, SourceKind source, int year, int n);

/// Sum of a product's output over months 1..n of a year.
double cumulative_product(const Dataset& d, const std::string& product, int year, int n);

struct ScenarioConfig {
    std::vector<EmissionFactorSet> scenarios;
    UncertaintySpec uncertainty = UncertaintySpec::defaults();
    std::string default_scenario;

    /// Throws Error(usage) with "unknown scenario" when absent.
    const EmissionFactorSet& find(const std::string& name) const;
    const EmissionFactorSet& default_set() const { return find(default_scenario); }
};

std::vector<std::string> preset_names();
/// Coal factor presets. Each one is the locally measured baseline with one
/// factor replaced by the agency's assumption.
std::optional<EmissionFactorSet> builtin_preset(const std::string& name);

/// INI-style configuration:
///
///     default = this-study
///     [uncertainty]   draws, seed, historical_band, sigma.<kind>[.<source>],
///                     sigma_abs.stock_change.<source> (file units)
///     [common]        factor keys applied to every scenario
///     [<name>]        preset = <preset>, heating_value.<source>,
///                     carbon_content.<source>, oxidation.<source>, cement_factor
///
/// Series values are comma lists: a bare number is the constant fallback and
/// `year=value` entries form the dynamic part.
ScenarioConfig parse_scenario_config(std::istream& in, const std::string& origin = "<config>");
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

}  // namespace carbonledger

#pragma once

// Core value types shared by every stage of the ledger: periods, fuel
// sources, unit-tagged quantities, flow records and emission-factor sets.
//
// Internal magnitudes are always held in base units (t, m3, TJ, tC, tCO2).
// Scaled reporting units (10^6 t, 10^9 m3, MtCO2) exist only at the file
// boundary.

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "carbonledger/error.hpp"

namespace carbonledger {

enum class SourceKind { coal, oil, natural_gas, cement };

inline constexpr std::array<SourceKind, 4> kAllSources{
    SourceKind::coal, SourceKind::oil, SourceKind::natural_gas, SourceKind::cement};
inline constexpr std::array<SourceKind, 3> kFuelSources{
    SourceKind::coal, SourceKind::oil, SourceKind::natural_gas};

std::string_view to_string(SourceKind source);
std::optional<SourceKind> parse_source(std::string_view token);
inline bool is_fuel(SourceKind s) { return s != SourceKind::cement; }

/// Inclusive bounds on accepted calendar years.
struct YearWindow {
    int first = 1949;
    int last = 2100;
};

/// A calendar year, optionally narrowed to one month. Cumulative aggregates
/// reuse the month field as "months 1..month".
struct Period {
    int year = 0;
    std::optional<int> month;

    static Period annual(int year) { return Period{year, std::nullopt}; }
    static Period monthly(int year, int month) { return Period{year, month}; }

    bool is_annual() const { return !month.has_value(); }
    Period previous_year() const { return Period{year - 1, month}; }

    friend auto operator<=>(const Period&, const Period&) = default;
    friend bool operator==(const Period&, const Period&) = default;
};

std::string to_string(const Period& p);
std::vector<std::string> check_period(const Period& p, YearWindow window = {});

enum class Unit { tonne, cubic_metre, terajoule, tonne_co2, tonne_carbon };

std::string_view to_string(Unit unit);
/// coal, oil and cement are counted in tonnes; natural gas in cubic metres.
Unit native_unit(SourceKind source);

class Quantity {
public:
    Quantity() = default;
    /// Throws Error(domain) for NaN or infinite magnitudes.
    Quantity(double magnitude, Unit unit);

    double magnitude() const { return magnitude_; }
    Unit unit() const { return unit_; }

    Quantity operator-() const { return Quantity(-magnitude_, unit_); }
    friend Quantity operator+(const Quantity& a, const Quantity& b);
    friend Quantity operator-(const Quantity& a, const Quantity& b);
    friend Quantity operator*(const Quantity& q, double k);
    friend Quantity operator*(double k, const Quantity& q) { return q * k; }

    friend bool operator==(const Quantity&, const Quantity&) = default;

private:
    double magnitude_ = 0.0;
    Unit unit_ = Unit::tonne;
};

/// One period's mass-balance inputs for one source. stock_change > 0 is a
/// stock build and reduces apparent consumption.
struct FlowRecord {
    Period period;
    SourceKind source = SourceKind::coal;
    Quantity production;
    Quantity imports;
    Quantity exports;
    Quantity stock_change;
    Quantity non_energy_use;
    std::string sector = "national";

    /// All-zero record in the source's native unit.
    static FlowRecord zero(Period period, SourceKind source, std::string sector = "national");

    friend bool operator==(const FlowRecord&, const FlowRecord&) = default;
};

/// Result of validate_flow: either the record or every violation found.
struct FlowCheck {
    std::optional<FlowRecord> record;
    std::vector<std::string> violations;

    bool ok() const { return record.has_value(); }
};

FlowCheck validate_flow(const FlowRecord& r, YearWindow window = {});
/// Throws ValidationError listing all violations.
const FlowRecord& require_valid(const FlowRecord& r, YearWindow window = {});

/// Year-keyed values with a constant fallback for years not in the map.
class YearSeries {
public:
    YearSeries() = default;
    explicit YearSeries(double fallback, std::map<int, double> by_year = {})
        : fallback_(fallback), by_year_(std::move(by_year)) {}

    double at(int year) const;
    bool covers(int year) const { return by_year_.contains(year); }
    bool is_constant() const { return by_year_.empty(); }
    double fallback() const { return fallback_; }
    const std::map<int, double>& by_year() const { return by_year_; }

    YearSeries scaled(double k) const;

    friend bool operator==(const YearSeries&, const YearSeries&) = default;

private:
    double fallback_ = 0.0;
    std::map<int, double> by_year_;
};

inline constexpr double kCoalHeatingValueGJPerTonne = 20.95;

/// Net heating values in GJ per native unit, per fuel.
class HeatingValueSeries {
public:
    /// Starts with the coal constant only.
    HeatingValueSeries();

    bool has(SourceKind s) const { return per_source_.contains(s); }
    const YearSeries& series(SourceKind s) const;
    void set(SourceKind s, YearSeries series);

    /// GJ per native unit. A year outside a dynamic series falls back to the
    /// constant and logs a warning once per (source, year).
    double at(SourceKind s, int year) const;

    const std::map<SourceKind, YearSeries>& all() const { return per_source_; }

    friend bool operator==(const HeatingValueSeries&, const HeatingValueSeries&) = default;

private:
    std::map<SourceKind, YearSeries> per_source_;
};

/// Scenario-scoped emission factors. Carbon content in tC/TJ, oxidation as a
/// fraction, cement factor in tC per tonne of cement.
struct EmissionFactorSet {
    std::string scenario_name;
    HeatingValueSeries heating_value;
    std::map<SourceKind, double> carbon_content;
    std::map<SourceKind, YearSeries> oxidation;
    std::optional<double> cement_factor;

    /// Throw Error(configuration) when the factor is absent.
    double carbon_content_of(SourceKind s) const;
    double oxidation_at(SourceKind s, int year) const;
    double cement_factor_value() const;

    friend bool operator==(const EmissionFactorSet&, const EmissionFactorSet&) = default;
};

std::vector<std::string> check_factor_set(const EmissionFactorSet& f);

inline constexpr double kGJPerTJ = 1000.0;

/// Native fuel amount to energy (TJ) using the year's heating value.
Quantity convert_unit(const Quantity& q, SourceKind source, int year,
                      const HeatingValueSeries& hv);

/// tC to tCO2 by the exact ratio 44/12.
Quantity co2_from_carbon(const Quantity& carbon);
inline double carbon_to_co2(double tc) { return tc * 44.0 / 12.0; }

}  // namespace carbonledger

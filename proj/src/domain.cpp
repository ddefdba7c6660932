#include "carbonledger/domain.hpp"

#include <cmath>
#include <mutex>
#include <set>
#include <utility>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace carbonledger {

std::string_view to_string(SourceKind source) {
    switch (source) {
        case SourceKind::coal: return "coal";
        case SourceKind::oil: return "oil";
        case SourceKind::natural_gas: return "natural_gas";
        case SourceKind::cement: return "cement";
    }
    return "?";
}

std::optional<SourceKind> parse_source(std::string_view token) {
    for (auto s : kAllSources) {
        if (token == to_string(s)) return s;
    }
    if (token == "gas") return SourceKind::natural_gas;
    return std::nullopt;
}

std::string to_string(const Period& p) {
    if (p.is_annual()) return std::to_string(p.year);
    return fmt::format("{}-{:02}", p.year, *p.month);
}

std::vector<std::string> check_period(const Period& p, YearWindow window) {
    std::vector<std::string> out;
    if (p.year < window.first || p.year > window.last) {
        out.push_back(fmt::format("year {} outside [{}, {}]", p.year, window.first, window.last));
    }
    if (p.month && (*p.month < 1 || *p.month > 12)) {
        out.push_back(fmt::format("month {} outside [1, 12]", *p.month));
    }
    return out;
}

std::string_view to_string(Unit unit) {
    switch (unit) {
        case Unit::tonne: return "t";
        case Unit::cubic_metre: return "m3";
        case Unit::terajoule: return "TJ";
        case Unit::tonne_co2: return "tCO2";
        case Unit::tonne_carbon: return "tC";
    }
    return "?";
}

Unit native_unit(SourceKind source) {
    return source == SourceKind::natural_gas ? Unit::cubic_metre : Unit::tonne;
}

Quantity::Quantity(double magnitude, Unit unit) : magnitude_(magnitude), unit_(unit) {
    if (!std::isfinite(magnitude)) {
        throw Error(ErrorCode::domain, "quantity magnitude must be finite");
    }
}

namespace {

void require_same_unit(const Quantity& a, const Quantity& b) {
    if (a.unit() != b.unit()) {
        throw Error(ErrorCode::unit_mismatch,
                    fmt::format("unit mismatch: {} vs {}", to_string(a.unit()), to_string(b.unit())));
    }
}

}  // namespace

Quantity operator+(const Quantity& a, const Quantity& b) {
    require_same_unit(a, b);
    return Quantity(a.magnitude_ + b.magnitude_, a.unit_);
}

Quantity operator-(const Quantity& a, const Quantity& b) {
    require_same_unit(a, b);
    return Quantity(a.magnitude_ - b.magnitude_, a.unit_);
}

Quantity operator*(const Quantity& q, double k) {
    return Quantity(q.magnitude_ * k, q.unit_);
}

FlowRecord FlowRecord::zero(Period period, SourceKind source, std::string sector) {
    const Quantity z(0.0, native_unit(source));
    return FlowRecord{period, source, z, z, z, z, z, std::move(sector)};
}

FlowCheck validate_flow(const FlowRecord& r, YearWindow window) {
    FlowCheck check;
    check.violations = check_period(r.period, window);

    const Unit native = native_unit(r.source);
    const std::pair<const char*, const Quantity*> fields[] = {
        {"production", &r.production},     {"import", &r.imports},
        {"export", &r.exports},            {"stock_change", &r.stock_change},
        {"non_energy_use", &r.non_energy_use},
    };
    for (const auto& [name, q] : fields) {
        if (q->unit() != native) {
            check.violations.push_back(fmt::format("unit mismatch in {}: expected {}, got {}", name,
                                                   to_string(native), to_string(q->unit())));
        }
    }
    for (const auto& [name, q] : {fields[0], fields[1], fields[2], fields[4]}) {
        if (q->magnitude() < 0.0) check.violations.push_back(fmt::format("negative {}", name));
    }
    if (r.source == SourceKind::cement) {
        for (const auto& [name, q] : {fields[1], fields[2], fields[3], fields[4]}) {
            if (q->magnitude() != 0.0) {
                check.violations.push_back(
                    fmt::format("cement carries production only ({} is nonzero)", name));
            }
        }
    }
    if (r.sector.empty()) check.violations.push_back("empty sector tag");

    if (check.violations.empty()) check.record = r;
    return check;
}

const FlowRecord& require_valid(const FlowRecord& r, YearWindow window) {
    auto check = validate_flow(r, window);
    if (!check.ok()) throw ValidationError(std::move(check.violations));
    return r;
}

double YearSeries::at(int year) const {
    if (auto it = by_year_.find(year); it != by_year_.end()) return it->second;
    return fallback_;
}

YearSeries YearSeries::scaled(double k) const {
    std::map<int, double> m;
    for (const auto& [y, v] : by_year_) m.emplace(y, v * k);
    return YearSeries(fallback_ * k, std::move(m));
}

HeatingValueSeries::HeatingValueSeries() {
    per_source_.emplace(SourceKind::coal, YearSeries(kCoalHeatingValueGJPerTonne));
}

const YearSeries& HeatingValueSeries::series(SourceKind s) const {
    auto it = per_source_.find(s);
    if (it == per_source_.end()) {
        throw Error(ErrorCode::configuration,
                    fmt::format("no heating value configured for {}", to_string(s)));
    }
    return it->second;
}

void HeatingValueSeries::set(SourceKind s, YearSeries series) {
    if (s == SourceKind::cement) {
        throw Error(ErrorCode::unsupported_source, "cement has no heating value");
    }
    per_source_.insert_or_assign(s, std::move(series));
}

namespace {

void warn_fallback_once(SourceKind s, int year, double value) {
    static std::mutex mu;
    static std::set<std::pair<SourceKind, int>> seen;
    std::lock_guard lock(mu);
    if (seen.emplace(s, year).second) {
        spdlog::warn("heating value for {} has no entry for {}; using constant {}",
                     to_string(s), year, value);
    }
}

}  // namespace

double HeatingValueSeries::at(SourceKind s, int year) const {
    const auto& ys = series(s);
    if (!ys.is_constant() && !ys.covers(year)) warn_fallback_once(s, year, ys.fallback());
    return ys.at(year);
}

double EmissionFactorSet::carbon_content_of(SourceKind s) const {
    auto it = carbon_content.find(s);
    if (it == carbon_content.end()) {
        throw Error(ErrorCode::configuration,
                    fmt::format("scenario '{}': no carbon content for {}", scenario_name, to_string(s)));
    }
    return it->second;
}

double EmissionFactorSet::oxidation_at(SourceKind s, int year) const {
    auto it = oxidation.find(s);
    if (it == oxidation.end()) {
        throw Error(ErrorCode::configuration,
                    fmt::format("scenario '{}': no oxidation rate for {}", scenario_name, to_string(s)));
    }
    return it->second.at(year);
}

double EmissionFactorSet::cement_factor_value() const {
    if (!cement_factor) {
        throw Error(ErrorCode::configuration,
                    fmt::format("scenario '{}': cement_factor is not set", scenario_name));
    }
    return *cement_factor;
}

std::vector<std::string> check_factor_set(const EmissionFactorSet& f) {
    std::vector<std::string> out;
    if (f.scenario_name.empty()) out.push_back("scenario name is empty");
    for (const auto& [s, ys] : f.heating_value.all()) {
        if (!(ys.fallback() > 0.0)) {
            out.push_back(fmt::format("heating_value.{} must be > 0", to_string(s)));
        }
        for (const auto& [y, v] : ys.by_year()) {
            if (!(v > 0.0)) {
                out.push_back(fmt::format("heating_value.{} for {} must be > 0", to_string(s), y));
            }
        }
    }
    for (const auto& [s, c] : f.carbon_content) {
        if (!(c > 0.0)) out.push_back(fmt::format("carbon_content.{} must be > 0", to_string(s)));
    }
    auto in_unit_interval = [](double o) { return o > 0.0 && o <= 1.0; };
    for (const auto& [s, ys] : f.oxidation) {
        bool ok = in_unit_interval(ys.fallback());
        for (const auto& [y, v] : ys.by_year()) ok = ok && in_unit_interval(v);
        if (!ok) out.push_back(fmt::format("oxidation.{} must lie in (0, 1]", to_string(s)));
    }
    if (f.cement_factor && !(*f.cement_factor >= 0.0)) out.push_back("cement_factor must be >= 0");
    return out;
}

Quantity convert_unit(const Quantity& q, SourceKind source, int year, const HeatingValueSeries& hv) {
    if (source == SourceKind::cement) {
        throw Error(ErrorCode::unsupported_source, "cement has no energy content");
    }
    if (q.unit() != native_unit(source)) {
        throw Error(ErrorCode::unit_mismatch,
                    fmt::format("{} must be given in {}, got {}", to_string(source),
                                to_string(native_unit(source)), to_string(q.unit())));
    }
    return Quantity(q.magnitude() * hv.at(source, year) / kGJPerTJ, Unit::terajoule);
}

Quantity co2_from_carbon(const Quantity& carbon) {
    if (carbon.unit() != Unit::tonne_carbon) {
        throw Error(ErrorCode::unit_mismatch, "co2_from_carbon expects tC");
    }
    if (carbon.magnitude() < 0.0) {
        throw Error(ErrorCode::domain, "carbon mass must be nonnegative");
    }
    return Quantity(carbon_to_co2(carbon.magnitude()), Unit::tonne_co2);
}

}  // namespace carbonledger

#include "carbonledger/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "text.hpp"

namespace carbonledger {

using detail::format_scaled;
using detail::parse_double;
using detail::parse_int;
using detail::parse_scaled;
using detail::split;
using detail::trim;

namespace {

std::string describe(const FlowKey& k) {
    return fmt::format("({}, {}, {})", to_string(k.period), to_string(k.source), k.sector);
}

FlowRecord add_fields(const FlowRecord& a, const FlowRecord& b) {
    FlowRecord out = a;
    out.production = a.production + b.production;
    out.imports = a.imports + b.imports;
    out.exports = a.exports + b.exports;
    out.stock_change = a.stock_change + b.stock_change;
    out.non_energy_use = a.non_energy_use + b.non_energy_use;
    return out;
}

/// Reads lines, skipping blanks and '#' comments, remembering line numbers.
struct LineReader {
    std::istream& in;
    std::size_t line_no = 0;

    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
            const auto t = trim(line);
            if (t.empty() || t.front() == '#') continue;
            return true;
        }
        return false;
    }
};

/// Maps header names to column positions and enforces required columns.
struct Header {
    std::vector<std::string> names;

    std::optional<std::size_t> index(std::string_view name) const {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) return std::nullopt;
        return static_cast<std::size_t>(it - names.begin());
    }
};

Header read_header(LineReader& reader, const std::string& origin,
                   const std::vector<std::string>& required,
                   const std::vector<std::string>& optional_cols,
                   std::vector<Diagnostic>& diags) {
    Header h;
    std::string line;
    if (!reader.next(line)) {
        diags.push_back({origin, 0, 0, "missing header row"});
        return h;
    }
    for (auto f : split(line, ',')) h.names.emplace_back(trim(f));
    for (std::size_t i = 0; i < h.names.size(); ++i) {
        const auto& n = h.names[i];
        const bool known = std::find(required.begin(), required.end(), n) != required.end() ||
                           std::find(optional_cols.begin(), optional_cols.end(), n) != optional_cols.end();
        if (!known) diags.push_back({origin, reader.line_no, i + 1, fmt::format("unknown column '{}'", n)});
        if (std::count(h.names.begin(), h.names.end(), n) > 1) {
            diags.push_back({origin, reader.line_no, i + 1, fmt::format("repeated column '{}'", n)});
        }
    }
    for (const auto& r : required) {
        if (!h.index(r)) diags.push_back({origin, reader.line_no, 0, fmt::format("missing column '{}'", r)});
    }
    return h;
}

}  // namespace

void Dataset::insert(const FlowRecord& r) {
    FlowKey key{r.period, r.source, r.sector};
    if (!flows.emplace(key, r).second) {
        throw Error(ErrorCode::duplicate_key, fmt::format("duplicate key {}", describe(key)));
    }
}

void Dataset::merge(const Dataset& later, const std::string& origin) {
    for (const auto& [key, rec] : later.flows) {
        auto [it, inserted] = flows.insert_or_assign(key, rec);
        if (!inserted) {
            audit.push_back({origin, describe(key), "restated by later file"});
            spdlog::info("{}: {} restated", origin, describe(key));
        }
    }
    for (const auto& [year, v] : later.gdp) {
        if (!gdp.insert_or_assign(year, v).second) {
            audit.push_back({origin, fmt::format("gdp {}", year), "restated by later file"});
        }
    }
    for (const auto& [year, v] : later.secondary_share) {
        if (!secondary_share.insert_or_assign(year, v).second) {
            audit.push_back({origin, fmt::format("secondary_share {}", year), "restated by later file"});
        }
    }
    for (const auto& [key, v] : later.industrial_products) {
        if (!industrial_products.insert_or_assign(key, v).second) {
            audit.push_back({origin, fmt::format("{} {}", key.product, to_string(key.period)),
                             "restated by later file"});
        }
    }
}

std::optional<FlowRecord> Dataset::aggregate(SourceKind source, const Period& period) const {
    std::optional<FlowRecord> out;
    for (auto it = flows.lower_bound(FlowKey{period, source, ""});
         it != flows.end() && it->first.period == period && it->first.source == source; ++it) {
        if (!out) {
            out = it->second;
            out->sector = "national";
        } else {
            *out = add_fields(*out, it->second);
        }
    }
    return out;
}

std::vector<int> Dataset::annual_years(SourceKind source) const {
    std::set<int> years;
    for (const auto& [key, rec] : flows) {
        if (key.source == source && key.period.is_annual()) years.insert(key.period.year);
    }
    return {years.begin(), years.end()};
}

int Dataset::monthly_prefix(SourceKind source, int year) const {
    int m = 0;
    while (m < 12 && aggregate(source, Period::monthly(year, m + 1))) ++m;
    return m;
}

bool Dataset::has_source(SourceKind source) const {
    return std::any_of(flows.begin(), flows.end(),
                       [&](const auto& kv) { return kv.first.source == source; });
}

std::vector<std::string> Dataset::check_invariants() const {
    std::vector<std::string> out;
    std::map<std::tuple<int, SourceKind, std::string>, std::set<int>> months;
    for (const auto& [key, rec] : flows) {
        if (key.period.month) months[{key.period.year, key.source, key.sector}].insert(*key.period.month);
    }
    for (const auto& [k, ms] : months) {
        const auto& [year, source, sector] = k;
        const int top = *ms.rbegin();
        if (static_cast<int>(ms.size()) != top) {
            std::vector<int> missing;
            for (int m = 1; m <= top; ++m) {
                if (!ms.contains(m)) missing.push_back(m);
            }
            out.push_back(fmt::format("monthly records for {} {} ({}) are not a contiguous prefix; missing {}",
                                      to_string(source), year, sector, fmt::join(missing, ", ")));
        }
    }
    for (const auto& [year, v] : gdp) {
        if (!(v > 0.0)) out.push_back(fmt::format("gdp for {} must be > 0", year));
    }
    for (const auto& [year, v] : secondary_share) {
        if (!(v >= 0.0 && v <= 1.0)) out.push_back(fmt::format("secondary_share for {} outside [0, 1]", year));
    }
    return out;
}

int file_unit_exponent(SourceKind source) {
    return source == SourceKind::natural_gas ? 9 : 6;
}

Dataset parse_flows_csv(std::istream& in, const std::string& origin, YearWindow window) {
    static const std::vector<std::string> required{"year",   "month",  "source",      "production",
                                                   "import", "export", "stock_change"};
    static const std::vector<std::string> optional_cols{"non_energy_use", "sector"};

    std::vector<Diagnostic> diags;
    LineReader reader{in};
    const Header header = read_header(reader, origin, required, optional_cols, diags);
    if (!diags.empty()) throw ParseError(std::move(diags));

    const auto col = [&](std::string_view name) { return header.index(name); };
    const bool has_non_energy = col("non_energy_use").has_value();
    if (!has_non_energy) {
        spdlog::warn("{}: no non_energy_use column; treating non-energy use as 0", origin);
    }

    Dataset out;
    std::map<FlowKey, std::size_t> first_line;
    std::string line;
    while (reader.next(line)) {
        const std::size_t ln = reader.line_no;
        const auto fields = split(line, ',');
        if (fields.size() != header.names.size()) {
            diags.push_back({origin, ln, 0,
                             fmt::format("expected {} fields, found {}", header.names.size(), fields.size())});
            continue;
        }
        const std::size_t before = diags.size();
        auto field = [&](std::string_view name) { return trim(fields[*col(name)]); };
        auto fail = [&](std::string_view name, std::string msg) {
            diags.push_back({origin, ln, *col(name) + 1, std::move(msg)});
        };

        const auto year = parse_int(field("year"));
        if (!year) fail("year", fmt::format("malformed year '{}'", field("year")));
        std::optional<int> month;
        if (!field("month").empty()) {
            if (auto m = parse_int(field("month"))) {
                month = static_cast<int>(*m);
            } else {
                fail("month", fmt::format("malformed month '{}'", field("month")));
            }
        }
        const auto source = parse_source(field("source"));
        if (!source) {
            fail("source", fmt::format("unknown source '{}' at line {}", field("source"), ln));
            continue;
        }
        const int shift = file_unit_exponent(*source);
        auto number = [&](std::string_view name) -> double {
            if (!col(name)) return 0.0;
            const auto text = field(name);
            if (auto v = parse_scaled(text, shift)) return *v;
            fail(name, fmt::format("malformed number '{}' in {}", text, name));
            return 0.0;
        };
        const double production = number("production");
        const double imports = number("import");
        const double exports = number("export");
        const double stock = number("stock_change");
        const double non_energy = number("non_energy_use");
        std::string sector = "national";
        if (col("sector") && !field("sector").empty()) sector = std::string(field("sector"));
        if (diags.size() != before) continue;

        const Unit u = native_unit(*source);
        FlowRecord rec{Period{static_cast<int>(*year), month},
                       *source,
                       Quantity(production, u),
                       Quantity(imports, u),
                       Quantity(exports, u),
                       Quantity(stock, u),
                       Quantity(non_energy, u),
                       sector};
        auto check = validate_flow(rec, window);
        if (!check.ok()) {
            for (auto& v : check.violations) diags.push_back({origin, ln, 0, std::move(v)});
            continue;
        }
        FlowKey key{rec.period, rec.source, rec.sector};
        if (auto [it, inserted] = first_line.emplace(key, ln); !inserted) {
            diags.push_back({origin, ln, 0,
                             fmt::format("duplicate key {} (first seen at line {})", describe(key), it->second)});
            continue;
        }
        out.flows.emplace(key, std::move(rec));
    }
    if (!diags.empty()) throw ParseError(std::move(diags));
    return out;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError({{path.string(), 0, 0, "cannot open file"}});
    return in;
}

}  // namespace

Dataset load_flows_file(const std::filesystem::path& path, YearWindow window) {
    auto in = open_input(path);
    return parse_flows_csv(in, path.string(), window);
}

void write_flows_csv(const Dataset& d, std::ostream& out) {
    out << "year,month,source,production,import,export,stock_change,non_energy_use,sector\n";
    for (const auto& [key, r] : d.flows) {
        const int shift = file_unit_exponent(r.source);
        out << r.period.year << ',' << (r.period.month ? std::to_string(*r.period.month) : "") << ','
            << to_string(r.source) << ',' << format_scaled(r.production.magnitude(), shift) << ','
            << format_scaled(r.imports.magnitude(), shift) << ','
            << format_scaled(r.exports.magnitude(), shift) << ','
            << format_scaled(r.stock_change.magnitude(), shift) << ','
            << format_scaled(r.non_energy_use.magnitude(), shift) << ',' << r.sector << '\n';
    }
}

Dataset parse_gdp_csv(std::istream& in, const std::string& origin) {
    std::vector<Diagnostic> diags;
    LineReader reader{in};
    const Header header = read_header(reader, origin, {"year", "gdp_index"}, {"secondary_share"}, diags);
    if (!diags.empty()) throw ParseError(std::move(diags));

    Dataset out;
    std::string line;
    while (reader.next(line)) {
        const std::size_t ln = reader.line_no;
        const auto fields = split(line, ',');
        if (fields.size() != header.names.size()) {
            diags.push_back({origin, ln, 0, "wrong number of fields"});
            continue;
        }
        const auto yi = *header.index("year");
        const auto gi = *header.index("gdp_index");
        const auto year = parse_int(fields[yi]);
        const auto gdp = parse_double(fields[gi]);
        if (!year) diags.push_back({origin, ln, yi + 1, "malformed year"});
        if (!gdp || !(*gdp > 0.0)) diags.push_back({origin, ln, gi + 1, "gdp_index must be a positive number"});
        std::optional<double> share;
        if (auto si = header.index("secondary_share"); si && !trim(fields[*si]).empty()) {
            share = parse_double(fields[*si]);
            if (!share || *share < 0.0 || *share > 1.0) {
                diags.push_back({origin, ln, *si + 1, "secondary_share must lie in [0, 1]"});
                share.reset();
            }
        }
        if (!year || !gdp) continue;
        const int y = static_cast<int>(*year);
        if (out.gdp.contains(y)) {
            diags.push_back({origin, ln, 0, fmt::format("duplicate year {}", y)});
            continue;
        }
        out.gdp[y] = *gdp;
        if (share) out.secondary_share[y] = *share;
    }
    if (!diags.empty()) throw ParseError(std::move(diags));
    return out;
}

Dataset parse_products_csv(std::istream& in, const std::string& origin) {
    std::vector<Diagnostic> diags;
    LineReader reader{in};
    const Header header = read_header(reader, origin, {"year", "month", "product", "output"}, {}, diags);
    if (!diags.empty()) throw ParseError(std::move(diags));

    Dataset out;
    std::string line;
    while (reader.next(line)) {
        const std::size_t ln = reader.line_no;
        const auto fields = split(line, ',');
        if (fields.size() != header.names.size()) {
            diags.push_back({origin, ln, 0, "wrong number of fields"});
            continue;
        }
        const auto get = [&](std::string_view n) { return trim(fields[*header.index(n)]); };
        const auto year = parse_int(get("year"));
        std::optional<int> month;
        bool ok = year.has_value();
        if (!year) diags.push_back({origin, ln, *header.index("year") + 1, "malformed year"});
        if (!get("month").empty()) {
            auto m = parse_int(get("month"));
            if (!m || *m < 1 || *m > 12) {
                diags.push_back({origin, ln, *header.index("month") + 1, "month must be 1..12"});
                ok = false;
            } else {
                month = static_cast<int>(*m);
            }
        }
        const auto output = parse_double(get("output"));
        if (!output || *output < 0.0) {
            diags.push_back({origin, ln, *header.index("output") + 1, "output must be a nonnegative number"});
            ok = false;
        }
        if (get("product").empty()) {
            diags.push_back({origin, ln, *header.index("product") + 1, "empty product name"});
            ok = false;
        }
        if (!ok) continue;
        ProductKey key{std::string(get("product")), Period{static_cast<int>(*year), month}};
        if (!out.industrial_products.emplace(key, *output).second) {
            diags.push_back({origin, ln, 0, fmt::format("duplicate key ({}, {})", key.product, to_string(key.period))});
        }
    }
    if (!diags.empty()) throw ParseError(std::move(diags));
    return out;
}

Dataset load_dataset(const std::vector<std::filesystem::path>& flow_files,
                     const std::optional<std::filesystem::path>& gdp_file,
                     const std::optional<std::filesystem::path>& products_file) {
    std::vector<Diagnostic> diags;
    Dataset out;
    auto absorb = [&](const std::string& origin, auto&& load) {
        try {
            out.merge(load(), origin);
        } catch (const ParseError& e) {
            diags.insert(diags.end(), e.diagnostics().begin(), e.diagnostics().end());
        }
    };
    for (const auto& f : flow_files) {
        absorb(f.string(), [&] { return load_flows_file(f); });
    }
    if (gdp_file) {
        absorb(gdp_file->string(), [&] {
            auto in = open_input(*gdp_file);
            return parse_gdp_csv(in, gdp_file->string());
        });
    }
    if (products_file) {
        absorb(products_file->string(), [&] {
            auto in = open_input(*products_file);
            return parse_products_csv(in, products_file->string());
        });
    }
    if (diags.empty()) {
        for (auto& v : out.check_invariants()) diags.push_back({"<dataset>", 0, 0, std::move(v)});
    }
    if (!diags.empty()) throw ParseError(std::move(diags));
    return out;
}

FlowRecord cumulative_months(const Dataset& d, SourceKind source, int year, int n) {
    if (n < 1 || n > 12) {
        throw Error(ErrorCode::domain, fmt::format("month count {} outside [1, 12]", n));
    }
    std::optional<FlowRecord> sum;
    std::vector<int> missing;
    for (int m = 1; m <= n; ++m) {
        auto rec = d.aggregate(source, Period::monthly(year, m));
        if (!rec) {
            missing.push_back(m);
            continue;
        }
        sum = sum ? add_fields(*sum, *rec) : *rec;
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::incomplete_prefix,
                    fmt::format("incomplete monthly prefix for {} {}: missing month(s) {}",
                                to_string(source), year, fmt::join(missing, ", ")));
    }
    sum->period = Period::monthly(year, n);
    sum->sector = "national";
    return *sum;
}

double cumulative_product(const Dataset& d, const std::string& product, int year, int n) {
    if (n < 1 || n > 12) {
        throw Error(ErrorCode::domain, fmt::format("month count {} outside [1, 12]", n));
    }
    double total = 0.0;
    std::vector<int> missing;
    for (int m = 1; m <= n; ++m) {
        auto it = d.industrial_products.find(ProductKey{product, Period::monthly(year, m)});
        if (it == d.industrial_products.end()) {
            missing.push_back(m);
        } else {
            total += it->second;
        }
    }
    if (!missing.empty()) {
        throw Error(ErrorCode::incomplete_prefix,
                    fmt::format("incomplete monthly prefix for {} {}: missing month(s) {}", product, year,
                                fmt::join(missing, ", ")));
    }
    return total;
}

// ---------------------------------------------------------------------------
// Scenario configuration

const EmissionFactorSet& ScenarioConfig::find(const std::string& name) const {
    for (const auto& s : scenarios) {
        if (s.scenario_name == name) return s;
    }
    throw Error(ErrorCode::usage, fmt::format("unknown scenario '{}'", name));
}

namespace {

struct CoalPreset {
    const char* name;
    double heating_value;
    double carbon_content;
    double oxidation;
};

// Locally measured baseline, then agency assumptions that differ from it in
// exactly one coal factor.
constexpr CoalPreset kPresets[] = {
    {"this-study", 20.95, 26.59, 0.92},
    {"UNFCCC-CN", 20.95, 26.59, 0.94},
    {"CDIAC", 20.95, 26.59, 0.98},
    {"IEA", 20.95, 26.59, 0.98},
    {"EDGAR", 20.95, 26.59, 1.00},
    {"BP", 20.95, 26.59, 1.00},
    {"EIA", 20.95, 26.59, 1.00},
    {"WorldBank", 20.95, 26.59, 1.00},
    {"UN-HV", 21.4, 26.59, 0.92},
    {"IPCC-default", 20.95, 25.9, 0.92},
};

void apply_preset(EmissionFactorSet& f, const CoalPreset& p) {
    f.heating_value.set(SourceKind::coal, YearSeries(p.heating_value));
    f.carbon_content[SourceKind::coal] = p.carbon_content;
    f.oxidation[SourceKind::coal] = YearSeries(p.oxidation);
}

const CoalPreset* find_preset(const std::string& name) {
    for (const auto& p : kPresets) {
        if (name == p.name) return &p;
    }
    return nullptr;
}

using boost::property_tree::ptree;

class ConfigReader {
public:
    explicit ConfigReader(std::string origin) : origin_(std::move(origin)) {}

    void error(const std::string& where, const std::string& msg) {
        diags_.push_back({origin_, 0, 0, where.empty() ? msg : fmt::format("[{}] {}", where, msg)});
    }
    std::vector<Diagnostic>& diagnostics() { return diags_; }

    std::optional<YearSeries> series(const std::string& where, const std::string& key,
                                     const std::string& text, const YearSeries* existing) {
        std::optional<double> fallback;
        std::map<int, double> by_year;
        bool ok = true;
        for (auto token : split(text, ',')) {
            token = trim(token);
            if (token.empty()) continue;
            if (const auto eq = token.find('='); eq != std::string_view::npos) {
                auto y = parse_int(token.substr(0, eq));
                auto v = parse_double(token.substr(eq + 1));
                if (!y || !v) {
                    error(where, fmt::format("{}: malformed entry '{}'", key, token));
                    ok = false;
                } else {
                    by_year[static_cast<int>(*y)] = *v;
                }
            } else if (auto v = parse_double(token); v && !fallback) {
                fallback = v;
            } else {
                error(where, fmt::format("{}: malformed value '{}'", key, token));
                ok = false;
            }
        }
        if (!ok) return std::nullopt;
        if (!fallback) {
            if (!existing) {
                error(where, fmt::format("{}: a constant value is required alongside year entries", key));
                return std::nullopt;
            }
            fallback = existing->fallback();
        }
        return YearSeries(*fallback, std::move(by_year));
    }

    std::optional<double> number(const std::string& where, const std::string& key, const std::string& text) {
        auto v = parse_double(text);
        if (!v) error(where, fmt::format("{}: malformed number '{}'", key, text));
        return v;
    }

    void apply_factor_key(EmissionFactorSet& f, const std::string& where, const std::string& key,
                          const std::string& value) {
        if (key == "cement_factor") {
            if (auto v = number(where, key, value)) f.cement_factor = *v;
            return;
        }
        const auto dot = key.find('.');
        const std::string field = key.substr(0, dot);
        const auto source = dot == std::string::npos ? std::nullopt : parse_source(key.substr(dot + 1));
        if (!source || !is_fuel(*source) ||
            (field != "heating_value" && field != "carbon_content" && field != "oxidation")) {
            error(where, fmt::format("unknown key '{}'", key));
            return;
        }
        if (field == "heating_value") {
            const YearSeries* existing = f.heating_value.has(*source) ? &f.heating_value.series(*source) : nullptr;
            if (auto s = series(where, key, value, existing)) f.heating_value.set(*source, *s);
        } else if (field == "oxidation") {
            auto it = f.oxidation.find(*source);
            if (auto s = series(where, key, value, it == f.oxidation.end() ? nullptr : &it->second)) {
                f.oxidation[*source] = *s;
            }
        } else if (auto v = number(where, key, value)) {
            f.carbon_content[*source] = *v;
        }
    }

    void apply_uncertainty(UncertaintySpec& spec, const ptree& section) {
        // Scalars and the defaults switch first, then kind-wide sigmas, then
        // per-source sigmas, so specific keys win regardless of file order.
        if (auto it = section.find("defaults"); it != section.not_found()) {
            const auto& d = it->second.data();
            if (d == "none") {
                spec.relative_sigma.clear();
            } else if (d != "standard") {
                error("uncertainty", fmt::format("defaults must be 'standard' or 'none', got '{}'", d));
            }
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& [key, node] : section) {
                const std::string& value = node.data();
                const auto parts = split(key, '.');
                const bool is_sigma = parts.size() >= 2 && (parts[0] == "sigma" || parts[0] == "sigma_abs");
                if (!is_sigma) {
                    if (pass == 0) apply_uncertainty_scalar(spec, key, value);
                    continue;
                }
                if (parts.size() > 3) {
                    if (pass == 0) error("uncertainty", fmt::format("unknown key '{}'", key));
                    continue;
                }
                const bool specific = parts.size() == 3;
                if (specific != (pass == 1)) continue;
                const auto kind = parse_input_kind(parts[1]);
                if (!kind) {
                    error("uncertainty", fmt::format("unknown input kind in '{}'", key));
                    continue;
                }
                auto v = number("uncertainty", key, value);
                if (!v) continue;
                const auto source = specific ? parse_source(parts[2]) : std::nullopt;
                if (parts[0] == "sigma_abs") {
                    if (*kind != InputKind::stock_change || !source || !is_fuel(*source)) {
                        error("uncertainty",
                              fmt::format("'{}': expected sigma_abs.stock_change.<fuel>", key));
                        continue;
                    }
                    spec.stock_change_abs_sigma[*source] =
                        *v * std::pow(10.0, file_unit_exponent(*source));
                } else if (specific) {
                    if (!source || !applies_to(*kind, *source)) {
                        error("uncertainty", fmt::format("'{}' does not name an applicable source", key));
                        continue;
                    }
                    spec.relative_sigma[{*kind, *source}] = *v;
                } else {
                    for (auto s : kAllSources) {
                        if (applies_to(*kind, s)) spec.relative_sigma[{*kind, s}] = *v;
                    }
                }
            }
        }
        for (auto& msg : spec.check()) error("uncertainty", msg);
    }

    void apply_uncertainty_scalar(UncertaintySpec& spec, const std::string& key, const std::string& value) {
        if (key == "defaults") return;
        if (key == "draws") {
            auto v = parse_int(value);
            if (!v || *v < 1) error("uncertainty", "draws must be an integer >= 1");
            else spec.draws = static_cast<std::size_t>(*v);
        } else if (key == "seed") {
            auto v = parse_int(value);
            if (!v || *v < 0) error("uncertainty", "seed must be a nonnegative integer");
            else spec.seed = static_cast<std::uint64_t>(*v);
        } else if (key == "historical_band") {
            if (auto v = number("uncertainty", key, value)) spec.historical_band = *v;
        } else {
            error("uncertainty", fmt::format("unknown key '{}'", key));
        }
    }

private:
    std::string origin_;
    std::vector<Diagnostic> diags_;
};

bool is_section(const ptree& node) {
    return !node.empty() || node.data().empty();
}

void check_completeness(ConfigReader& reader, const EmissionFactorSet& f) {
    for (auto s : kFuelSources) {
        const bool hv = f.heating_value.has(s);
        const bool c = f.carbon_content.contains(s);
        const bool o = f.oxidation.contains(s);
        if (s == SourceKind::coal || hv || c || o) {
            const auto name = std::string(to_string(s));
            if (!hv) reader.error(f.scenario_name, "missing required field heating_value." + name);
            if (!c) reader.error(f.scenario_name, "missing required field carbon_content." + name);
            if (!o) reader.error(f.scenario_name, "missing required field oxidation." + name);
        }
    }
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& p : kPresets) out.emplace_back(p.name);
    return out;
}

std::optional<EmissionFactorSet> builtin_preset(const std::string& name) {
    const auto* p = find_preset(name);
    if (!p) return std::nullopt;
    EmissionFactorSet f;
    f.scenario_name = name;
    apply_preset(f, *p);
    return f;
}

ScenarioConfig parse_scenario_config(std::istream& in, const std::string& origin) {
    ptree root;
    try {
        boost::property_tree::ini_parser::read_ini(in, root);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ParseError({{origin, e.line(), 0, e.message()}});
    }

    ConfigReader reader(origin);
    ScenarioConfig cfg;
    const ptree empty;
    const ptree* common = &empty;
    std::vector<std::string> order;
    std::map<std::string, const ptree*> sections;

    auto note_scenario = [&](const std::string& name) {
        if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
    };

    for (const auto& [key, node] : root) {
        if (key == "default" && node.empty()) {
            cfg.default_scenario = node.data();
        } else if (key == "scenarios" && node.empty()) {
            for (auto name : split(node.data(), ',')) {
                if (!trim(name).empty()) note_scenario(std::string(trim(name)));
            }
        } else if (key == "uncertainty" && is_section(node)) {
            reader.apply_uncertainty(cfg.uncertainty, node);
        } else if (key == "common" && is_section(node)) {
            common = &node;
        } else if (is_section(node)) {
            note_scenario(key);
            sections[key] = &node;
        } else {
            reader.error("", fmt::format("unknown top-level key '{}'", key));
        }
    }

    for (const auto& name : order) {
        EmissionFactorSet f;
        f.scenario_name = name;
        const ptree* section = sections.contains(name) ? sections[name] : &empty;

        for (const auto& [key, node] : *common) reader.apply_factor_key(f, "common", key, node.data());

        std::string preset_name = name;
        bool explicit_preset = false;
        if (auto it = section->find("preset"); it != section->not_found()) {
            preset_name = it->second.data();
            explicit_preset = true;
        }
        if (const auto* p = find_preset(preset_name)) {
            apply_preset(f, *p);
        } else if (explicit_preset) {
            reader.error(name, fmt::format("unknown preset reference '{}'", preset_name));
        } else if (!sections.contains(name)) {
            reader.error(name, fmt::format("unknown preset reference '{}'", name));
        }

        for (const auto& [key, node] : *section) {
            if (key == "preset" || key == "description") continue;
            reader.apply_factor_key(f, name, key, node.data());
        }
        for (auto& msg : check_factor_set(f)) reader.error(name, msg);
        check_completeness(reader, f);
        cfg.scenarios.push_back(std::move(f));
    }

    if (cfg.scenarios.empty()) reader.error("", "at least one scenario is required");
    if (cfg.default_scenario.empty() && !cfg.scenarios.empty()) {
        cfg.default_scenario = cfg.scenarios.front().scenario_name;
    }
    if (!cfg.scenarios.empty() &&
        std::none_of(cfg.scenarios.begin(), cfg.scenarios.end(),
                     [&](const auto& s) { return s.scenario_name == cfg.default_scenario; })) {
        reader.error("", fmt::format("default scenario '{}' is not defined", cfg.default_scenario));
    }
    if (!reader.diagnostics().empty()) throw ParseError(std::move(reader.diagnostics()));
    return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_scenario_config(in, path.string());
}

}  // namespace carbonledger

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "carbonledger/balance.hpp"
#include "carbonledger/emission.hpp"
#include "carbonledger/error.hpp"
#include "carbonledger/ingest.hpp"
#include "carbonledger/nowcast.hpp"
#include "carbonledger/uncertainty.hpp"
#include "manifest.hpp"

#ifndef CARBONLEDGER_VERSION
#define CARBONLEDGER_VERSION "0.0.0"
#endif

namespace carbonledger::cli {

namespace fs = std::filesystem;

namespace {

std::string env(const std::string& name) { return "CARBONLEDGER_" + name; }

struct CommonFlags {
    std::vector<std::string> flows;
    std::string config;
    std::string scenario;
    std::string gdp;
    std::string products;
    int threads = 0;
};

struct Context {
    std::vector<std::string> args;
    std::ostream& out;
    std::ostream& err;
};

/// Everything a command produces. Nothing touches the file system until the
/// whole set has been rendered.
struct Outputs {
    struct File {
        fs::path path;
        std::string bytes;
    };
    std::vector<File> files;
    std::vector<std::string> inputs;
    std::string scenario;
    std::optional<std::uint64_t> seed;
};

void commit(const Context& ctx, const Outputs& o) {
    RunManifest m;
    for (const auto& in : o.inputs) m.inputs.push_back({in, sha256_file(in)});
    for (const auto& f : o.files) m.outputs.push_back({f.path.string(), sha256_bytes(f.bytes)});
    m.scenario = o.scenario;
    m.seed = o.seed;
    m.version = CARBONLEDGER_VERSION;
    m.timestamp = build_timestamp();
    m.command_line.push_back("carbonledger");
    m.command_line.insert(m.command_line.end(), ctx.args.begin(), ctx.args.end());
    const std::string manifest = to_json(m);
    for (const auto& f : o.files) write_atomic(f.path, f.bytes);
    for (const auto& f : o.files) write_atomic(manifest_path_for(f.path), manifest);
}

/// Writes to files when a path is set, otherwise to stdout.
void emit(const Context& ctx, Outputs& o) {
    std::vector<Outputs::File> to_disk;
    bool first = true;
    for (auto& f : o.files) {
        if (f.path.empty()) {
            if (!first) ctx.out << '\n';
            ctx.out << f.bytes;
            first = false;
        } else {
            to_disk.push_back(std::move(f));
        }
    }
    o.files = std::move(to_disk);
    if (!o.files.empty()) commit(ctx, o);
}

double clean(double x) { return x == 0.0 ? 0.0 : x; }
std::string mt(double tco2) { return fmt::format("{:.6f}", clean(tco2 / 1e6)); }
std::string pct(double p) { return fmt::format("{:.4f}", clean(p)); }

ScenarioConfig load_config(const CommonFlags& c) {
    if (!c.config.empty()) return load_scenario_config(c.config);
    ScenarioConfig cfg;
    for (const auto& name : preset_names()) cfg.scenarios.push_back(*builtin_preset(name));
    cfg.default_scenario = "this-study";
    return cfg;
}

const EmissionFactorSet& pick(const ScenarioConfig& cfg, const std::string& name) {
    return name.empty() ? cfg.default_set() : cfg.find(name);
}

std::optional<fs::path> optional_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
}

Dataset load(const CommonFlags& c, const std::vector<std::string>& extra = {}) {
    std::vector<fs::path> files(c.flows.begin(), c.flows.end());
    files.insert(files.end(), extra.begin(), extra.end());
    if (files.empty()) throw Error(ErrorCode::usage, "no flow files given (--flows)");
    return load_dataset(files, optional_path(c.gdp), optional_path(c.products));
}

std::vector<std::string> input_list(const CommonFlags& c, const std::vector<std::string>& extra = {}) {
    std::vector<std::string> out = c.flows;
    out.insert(out.end(), extra.begin(), extra.end());
    for (const auto* s : {&c.config, &c.gdp, &c.products}) {
        if (!s->empty()) out.push_back(*s);
    }
    return out;
}

ExecutionPolicy policy_for(int threads) {
    return threads == 1 ? ExecutionPolicy::serial() : ExecutionPolicy::parallel(threads);
}

std::pair<int, int> annual_range(const Dataset& d) {
    std::set<int> years;
    for (auto s : kAllSources) {
        for (int y : d.annual_years(s)) years.insert(y);
    }
    if (years.empty()) throw Error(ErrorCode::missing_data, "dataset has no annual records");
    return {*years.begin(), *years.rbegin()};
}

fs::path sibling(const fs::path& p, const std::string& suffix) {
    return p.parent_path() / (p.stem().string() + suffix + p.extension().string());
}

void add_common(CLI::App* cmd, CommonFlags& c) {
    cmd->add_option("--flows", c.flows, "Flow CSV (repeatable; later files restate earlier ones)")
        ->envname(env("FLOWS"))
        ->delimiter(',');
    cmd->add_option("--config", c.config, "Scenario configuration (INI)")->envname(env("CONFIG"));
    cmd->add_option("--scenario", c.scenario, "Scenario name (default: the config's default)")
        ->envname(env("SCENARIO"));
    cmd->add_option("--gdp", c.gdp, "GDP and secondary-industry share CSV")->envname(env("GDP"));
    cmd->add_option("--products", c.products, "Industrial products CSV")->envname(env("PRODUCTS"));
    cmd->add_option("--threads", c.threads, "Worker threads; 1 runs serially, 0 uses the OpenMP default")
        ->envname(env("THREADS"))
        ->check(CLI::NonNegativeNumber);
}

// ---- compute ---------------------------------------------------------------

struct ComputeFlags {
    std::optional<int> from;
    std::optional<int> to;
    std::string out;
};

int cmd_compute(const Context& ctx, const CommonFlags& c, const ComputeFlags& f) {
    const auto cfg = load_config(c);
    const auto& factors = pick(cfg, c.scenario);
    const auto d = load(c);
    const auto [lo, hi] = annual_range(d);
    const int from = f.from.value_or(lo);
    const int to = f.to.value_or(hi);
    if (from > to) throw Error(ErrorCode::usage, fmt::format("--from {} is after --to {}", from, to));

    std::string csv = "year,scenario,source,energy_TJ,emissions_MtCO2,lo68_MtCO2,hi68_MtCO2\n";
    for (auto e : total_emissions(d, factors, from, to)) {
        for (auto s : e.anomalous) {
            spdlog::warn("{} {}: negative apparent consumption", to_string(s), e.year);
        }
        double fuel_energy = 0.0;
        for (const auto& [s, q] : e.per_source) {
            std::string energy;
            if (auto it = e.energy.find(s); it != e.energy.end()) {
                energy = fmt::format("{:.3f}", clean(it->second.magnitude()));
                fuel_energy += it->second.magnitude();
            }
            csv += fmt::format("{},{},{},{},{},,\n", e.year, factors.scenario_name, to_string(s), energy,
                               mt(q.magnitude()));
        }
        std::string band_lo, band_hi;
        if (cfg.uncertainty.historical_band > 0.0) {
            e = with_relative_band(std::move(e), cfg.uncertainty.historical_band);
            band_lo = mt(e.band->lo.magnitude());
            band_hi = mt(e.band->hi.magnitude());
        }
        csv += fmt::format("{},{},total,{:.3f},{},{},{}\n", e.year, factors.scenario_name, clean(fuel_energy),
                           mt(e.total.magnitude()), band_lo, band_hi);
    }

    Outputs o;
    o.files.push_back({f.out, std::move(csv)});
    o.inputs = input_list(c);
    o.scenario = factors.scenario_name;
    emit(ctx, o);
    return kOk;
}

// ---- uncertainty -----------------------------------------------------------

struct UncertaintyFlags {
    std::optional<int> year;
    std::optional<std::size_t> draws;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string contributions;
};

int cmd_uncertainty(const Context& ctx, const CommonFlags& c, const UncertaintyFlags& f) {
    const auto cfg = load_config(c);
    const auto& factors = pick(cfg, c.scenario);
    UncertaintySpec spec = cfg.uncertainty;
    if (f.draws) spec.draws = *f.draws;
    if (f.seed) spec.seed = *f.seed;
    if (spec.draws < kMinBandDraws) {
        throw Error(ErrorCode::usage, fmt::format("a band needs at least {} draws (got {})", kMinBandDraws,
                                                  spec.draws));
    }
    const auto d = load(c);
    const int year = f.year.value_or(annual_range(d).second);
    const auto policy = policy_for(c.threads);

    const auto r = monte_carlo_band(d, factors, year, spec, policy);
    std::string band = "year,scenario,central_MtCO2,lo68,hi68,draws,seed\n";
    band += fmt::format("{},{},{},{},{},{},{}\n", r.year, r.scenario_name, mt(r.central.magnitude()),
                        mt(r.band->lo.magnitude()), mt(r.band->hi.magnitude()), r.draws_used, r.seed);

    Outputs o;
    o.files.push_back({f.out, std::move(band)});
    o.inputs = input_list(c);
    o.scenario = factors.scenario_name;
    o.seed = spec.seed;

    std::optional<std::string> failure;
    try {
        std::string csv = "factor,source,share_percent\n";
        for (const auto& k : contribution_decomposition(d, factors, year, spec, policy)) {
            csv += fmt::format("{},{},{}\n", to_string(k.key.kind), to_string(k.key.source), pct(k.percent));
        }
        fs::path path = f.contributions;
        if (path.empty() && !f.out.empty()) path = sibling(f.out, "_contributions");
        o.files.push_back({path, std::move(csv)});
    } catch (const Error& e) {
        if (e.code() != ErrorCode::undefined_contributions) throw;
        failure = e.what();
    }
    emit(ctx, o);
    if (failure) {
        ctx.err << "error: " << *failure << '\n';
        return kRuntimeError;
    }
    return kOk;
}

// ---- project ---------------------------------------------------------------

struct ProjectFlags {
    std::vector<std::string> monthly;
    std::optional<int> year;
    int months = 10;
    std::optional<std::size_t> draws;
    std::optional<std::uint64_t> seed;
    bool pooled = false;
    std::string out;
};

int latest_monthly_year(const Dataset& d) {
    int year = 0;
    for (const auto& [key, rec] : d.flows) {
        if (key.period.month) year = std::max(year, key.period.year);
    }
    if (year == 0) throw Error(ErrorCode::missing_data, "dataset has no monthly records");
    return year;
}

void check_monthly_coverage(const Dataset& d, int year, int months) {
    std::vector<std::string> gaps;
    for (auto s : kAllSources) {
        if (!d.has_source(s)) continue;
        for (int y : {year - 1, year}) {
            const int have = d.monthly_prefix(s, y);
            if (have >= months) continue;
            gaps.push_back(have + 1 == months
                               ? fmt::format("{} {}-{:02}", to_string(s), y, months)
                               : fmt::format("{} {}-{:02}..{:02}", to_string(s), y, have + 1, months));
        }
    }
    if (!gaps.empty()) {
        throw Error(ErrorCode::incomplete_prefix,
                    fmt::format("incomplete monthly data, missing: {}", fmt::join(gaps, ", ")));
    }
}

int cmd_project(const Context& ctx, const CommonFlags& c, const ProjectFlags& f) {
    const auto cfg = load_config(c);
    const auto& factors = pick(cfg, c.scenario);
    const auto d = load(c, f.monthly);

    NowcastOptions opt;
    opt.year = f.year.value_or(latest_monthly_year(d));
    opt.months = f.months;
    opt.pooling = f.pooled ? Pooling::pooled_fuels : Pooling::per_source;
    opt.draws = f.draws.value_or(cfg.uncertainty.draws);
    opt.seed = f.seed.value_or(cfg.uncertainty.seed);
    opt.policy = policy_for(c.threads);
    if (opt.draws < kMinBandDraws) {
        throw Error(ErrorCode::usage, fmt::format("a projection range needs at least {} draws (got {})",
                                                  kMinBandDraws, opt.draws));
    }
    check_monthly_coverage(d, opt.year, opt.months);

    const auto r = nowcast(d, factors, opt);
    std::string csv = "source,basis_months,growth_central_pct,lo68_pct,hi68_pct,year,summary\n";
    auto row = [&](std::string_view name, const SourceGrowth& g) {
        csv += fmt::format("{},{},{},{},{},{},{}\n", name, opt.months, pct(g.central), pct(g.lo68), pct(g.hi68),
                           opt.year, format_growth(g.central, g.lo68, g.hi68));
    };
    for (const auto& g : r.projection.per_source) row(to_string(g.source), g);
    row("total", r.projection.total);

    Outputs o;
    o.files.push_back({f.out, std::move(csv)});
    o.inputs = input_list(c, f.monthly);
    o.scenario = factors.scenario_name;
    o.seed = opt.seed;
    emit(ctx, o);
    return kOk;
}

// ---- compare ---------------------------------------------------------------

struct CompareFlags {
    std::vector<std::string> scenarios;
    std::string baseline;
    std::optional<int> from;
    std::optional<int> to;
    std::string out;
};

int cmd_compare(const Context& ctx, const CommonFlags& c, const CompareFlags& f) {
    if (f.scenarios.size() < 2) {
        throw Error(ErrorCode::usage,
                    fmt::format("compare needs at least 2 scenarios (got {})", f.scenarios.size()));
    }
    const auto cfg = load_config(c);
    std::vector<EmissionFactorSet> sets;
    for (const auto& name : f.scenarios) sets.push_back(cfg.find(name));

    std::string baseline = f.baseline;
    if (baseline.empty()) {
        const bool has_default = std::find(f.scenarios.begin(), f.scenarios.end(), cfg.default_scenario) !=
                                 f.scenarios.end();
        baseline = has_default ? cfg.default_scenario : f.scenarios.front();
    } else if (std::find(f.scenarios.begin(), f.scenarios.end(), baseline) == f.scenarios.end()) {
        throw Error(ErrorCode::usage, fmt::format("baseline '{}' is not among --scenarios", baseline));
    }

    const auto d = load(c);
    const auto [lo, hi] = annual_range(d);
    const auto cmp = scenario_compare(d, sets, baseline, f.from.value_or(lo), f.to.value_or(hi));
    if (!cmp.failures.empty()) {
        std::vector<std::string> lines;
        for (const auto& [name, msg] : cmp.failures) lines.push_back(fmt::format("{}: {}", name, msg));
        throw Error(ErrorCode::validation, fmt::format("scenario comparison failed: {}", fmt::join(lines, "; ")));
    }

    std::string csv = "year,scenario,source,emissions_MtCO2,ratio_to_default,deviation_pct\n";
    for (const auto& r : cmp.rows) {
        csv += fmt::format("{},{},{},{},{},{}\n", r.year, r.scenario,
                           r.source ? std::string(to_string(*r.source)) : std::string("total"),
                           mt(r.emissions_tco2),
                           r.ratio_to_default ? fmt::format("{:.6f}", *r.ratio_to_default) : std::string(),
                           r.deviation_percent ? pct(*r.deviation_percent) : std::string());
    }

    Outputs o;
    o.files.push_back({f.out, std::move(csv)});
    o.inputs = input_list(c);
    o.scenario = baseline;
    emit(ctx, o);
    return kOk;
}

// ---- report ----------------------------------------------------------------

struct ReportFlags {
    std::vector<std::string> in;
    std::string format = "text";
    std::string gdp;
    std::string products;
    std::string out;
};

struct CsvFile {
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;
};

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

CsvFile read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::missing_data, fmt::format("cannot open '{}'", path));
    CsvFile f;
    f.path = path;
    std::vector<Diagnostic> diags;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line == "\r") continue;
        auto fields = split_fields(line);
        if (f.header.empty()) {
            f.header = std::move(fields);
            continue;
        }
        if (fields.size() != f.header.size()) {
            diags.push_back({path, n, 0,
                             fmt::format("expected {} fields, found {}", f.header.size(), fields.size())});
            continue;
        }
        f.rows.push_back(std::move(fields));
        f.lines.push_back(n);
    }
    if (f.header.empty()) diags.push_back({path, 0, 0, "empty file"});
    if (!diags.empty()) throw ParseError(std::move(diags));
    return f;
}

/// Numeric cell access that collects every problem before failing.
class Cells {
public:
    explicit Cells(const CsvFile& f) : f_(f) {}

    double number(std::size_t row, std::size_t col) {
        const std::string& s = f_.rows[row][col];
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
            diags_.push_back({f_.path, f_.lines[row], col + 1,
                              fmt::format("{} '{}' is not a number", f_.header[col], s)});
        }
        return v;
    }

    std::optional<double> maybe(std::size_t row, std::size_t col) {
        if (f_.rows[row][col].empty()) return std::nullopt;
        return number(row, col);
    }

    int year(std::size_t row, std::size_t col) { return static_cast<int>(number(row, col)); }

    const std::string& text(std::size_t row, std::size_t col) const { return f_.rows[row][col]; }

    void fail(std::size_t row, std::size_t col, std::string message) {
        diags_.push_back({f_.path, f_.lines[row], col + 1, std::move(message)});
    }

    void finish() {
        if (!diags_.empty()) throw ParseError(std::move(diags_));
    }

private:
    const CsvFile& f_;
    std::vector<Diagnostic> diags_;
};

struct Table {
    std::string name;
    std::string title;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string render_text(const std::vector<Table>& tables) {
    std::string out;
    for (const auto& t : tables) {
        if (!out.empty()) out += '\n';
        out += t.title + "\n";
        std::vector<std::size_t> width(t.header.size(), 0);
        for (std::size_t j = 0; j < t.header.size(); ++j) width[j] = t.header[j].size();
        for (const auto& r : t.rows) {
            for (std::size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], r[j].size());
        }
        auto line = [&](const std::vector<std::string>& cells) {
            std::string s;
            for (std::size_t j = 0; j < cells.size(); ++j) {
                if (j) s += "  ";
                s += j == 0 ? fmt::format("{:<{}}", cells[j], width[j]) : fmt::format("{:>{}}", cells[j], width[j]);
            }
            while (!s.empty() && s.back() == ' ') s.pop_back();
            return s + "\n";
        };
        out += line(t.header);
        for (const auto& r : t.rows) out += line(r);
    }
    return out;
}

/// Long form: one value per line, keyed by the row's first cell.
std::string render_csv(const std::vector<Table>& tables) {
    std::string out = "table,key,series,value\n";
    for (const auto& t : tables) {
        for (const auto& r : t.rows) {
            for (std::size_t j = 1; j < r.size(); ++j) {
                if (r[j].empty()) continue;
                out += fmt::format("{},{},{},{}\n", t.name, r[0], t.header[j], r[j]);
            }
        }
    }
    return out;
}

const std::vector<std::string> kEmissionsHeader{"year", "scenario", "source", "energy_TJ",
                                                "emissions_MtCO2", "lo68_MtCO2", "hi68_MtCO2"};
const std::vector<std::string> kProjectionHeader{"source",   "basis_months", "growth_central_pct", "lo68_pct",
                                                 "hi68_pct", "year",         "summary"};
const std::vector<std::string> kComparisonHeader{"year", "scenario", "source", "emissions_MtCO2",
                                                 "ratio_to_default", "deviation_pct"};
const std::vector<std::string> kBandHeader{"year", "scenario", "central_MtCO2", "lo68", "hi68", "draws", "seed"};
const std::vector<std::string> kContributionsHeader{"factor", "source", "share_percent"};

std::string yoy_cell(const std::map<int, double>& series, int year) {
    auto prev = series.find(year - 1);
    auto cur = series.find(year);
    if (prev == series.end() || cur == series.end() || !(prev->second > 0.0)) return "";
    return fmt::format("{:.2f}", clean(growth_percent(prev->second, cur->second)));
}

void emissions_tables(const CsvFile& f, const Dataset& aux, bool have_gdp, std::vector<Table>& out) {
    Cells cells(f);
    // scenario -> year -> estimate, in file order of scenarios
    std::vector<std::string> scenario_order;
    std::map<std::string, std::map<int, EmissionEstimate>> by_scenario;
    for (std::size_t i = 0; i < f.rows.size(); ++i) {
        const int year = cells.year(i, 0);
        const std::string& scenario = cells.text(i, 1);
        const std::string& source = cells.text(i, 2);
        const auto energy = cells.maybe(i, 3);
        const double emissions = cells.number(i, 4) * 1e6;
        if (!by_scenario.contains(scenario)) scenario_order.push_back(scenario);
        auto& e = by_scenario[scenario][year];
        e.year = year;
        e.scenario_name = scenario;
        if (source == "total") {
            e.total = Quantity(emissions, Unit::tonne_co2);
            continue;
        }
        const auto s = parse_source(source);
        if (!s) {
            cells.fail(i, 2, fmt::format("unknown source '{}'", source));
            continue;
        }
        e.per_source[*s] = Quantity(emissions, Unit::tonne_co2);
        if (energy) e.energy[*s] = Quantity(*energy, Unit::terajoule);
    }
    cells.finish();

    for (const auto& scenario : scenario_order) {
        const auto& years = by_scenario[scenario];
        std::set<SourceKind> sources;
        std::map<SourceKind, std::map<int, double>> per_source;
        std::map<int, double> totals;
        for (const auto& [y, e] : years) {
            totals[y] = e.total.magnitude();
            for (const auto& [s, q] : e.per_source) {
                sources.insert(s);
                per_source[s][y] = q.magnitude();
            }
        }
        Table t{"growth:" + scenario, fmt::format("Emissions and year-on-year growth ({})", scenario), {"year"}, {}};
        for (auto s : sources) t.header.push_back(fmt::format("{}_yoy_pct", to_string(s)));
        t.header.push_back("total_MtCO2");
        t.header.push_back("total_yoy_pct");
        for (const auto& [y, e] : years) {
            std::vector<std::string> row{std::to_string(y)};
            for (auto s : sources) row.push_back(yoy_cell(per_source[s], y));
            row.push_back(fmt::format("{:.3f}", clean(e.total.magnitude() / 1e6)));
            row.push_back(yoy_cell(totals, y));
            t.rows.push_back(std::move(row));
        }
        out.push_back(std::move(t));

        if (have_gdp) {
            std::vector<EmissionEstimate> estimates;
            for (const auto& [y, e] : years) estimates.push_back(e);
            const auto ind = intensity_indicators(estimates, aux);
            Table it{"intensity:" + scenario,
                     fmt::format("Emission intensity and drivers ({})", scenario),
                     {"year", "co2_per_gdp_MtCO2", "co2_per_gdp_yoy_pct", "coal_share_energy_pct",
                      "secondary_share_pct"},
                     {}};
            std::map<int, double> intensity;
            for (const auto& [y, row] : ind) intensity[y] = row.co2_intensity;
            for (const auto& [y, row] : ind) {
                it.rows.push_back({std::to_string(y), fmt::format("{:.6f}", clean(row.co2_intensity / 1e6)),
                                   yoy_cell(intensity, y), fmt::format("{:.2f}", 100.0 * row.coal_share_energy),
                                   row.secondary_share ? fmt::format("{:.2f}", 100.0 * *row.secondary_share)
                                                       : std::string()});
            }
            out.push_back(std::move(it));
        }
    }
}

void driver_table(const Dataset& aux, std::vector<Table>& out) {
    std::map<std::string, std::map<int, double>> annual;
    std::map<std::string, std::map<int, std::map<int, double>>> monthly;
    for (const auto& [key, value] : aux.industrial_products) {
        if (key.period.month) {
            monthly[key.product][key.period.year][*key.period.month] = value;
        } else {
            annual[key.product][key.period.year] = value;
        }
    }
    for (const auto& [product, years] : monthly) {
        for (const auto& [y, months] : years) {
            if (months.size() != 12 || annual[product].contains(y)) continue;
            double sum = 0.0;
            for (const auto& [m, v] : months) sum += v;
            annual[product][y] = sum;
        }
    }
    if (annual.empty()) return;
    std::set<int> years;
    for (const auto& [p, series] : annual) {
        for (const auto& [y, v] : series) years.insert(y);
    }
    Table t{"drivers", "Industrial product output, year-on-year growth", {"year"}, {}};
    for (const auto& [p, series] : annual) t.header.push_back(p + "_yoy_pct");
    for (int y : years) {
        std::vector<std::string> row{std::to_string(y)};
        for (const auto& [p, series] : annual) row.push_back(yoy_cell(series, y));
        t.rows.push_back(std::move(row));
    }
    out.push_back(std::move(t));
}

std::string basis_label(int months) {
    static const char* words[] = {"zero", "one", "two",   "three", "four",   "five",
                                  "six",  "seven", "eight", "nine", "ten", "eleven", "twelve"};
    const std::string n = months >= 0 && months <= 12 ? words[months] : std::to_string(months);
    return fmt::format("Based on first {} months data", n);
}

void projection_table(const std::vector<CsvFile>& files, std::vector<Table>& out) {
    std::set<int, std::greater<>> bases;
    std::vector<std::string> order;
    std::map<std::string, std::map<int, std::string>> cells_by_source;
    std::set<int> years;
    for (const auto& f : files) {
        Cells cells(f);
        for (std::size_t i = 0; i < f.rows.size(); ++i) {
            const int basis = cells.year(i, 1);
            cells.number(i, 2);
            cells.number(i, 3);
            cells.number(i, 4);
            years.insert(cells.year(i, 5));
            const std::string& source = cells.text(i, 0);
            if (source != "total" && !parse_source(source)) {
                cells.fail(i, 0, fmt::format("unknown source '{}'", source));
            }
            bases.insert(basis);
            if (!cells_by_source.contains(source)) order.push_back(source);
            cells_by_source[source][basis] = cells.text(i, 6);
        }
        cells.finish();
    }
    // Sources in canonical order, total last.
    std::stable_sort(order.begin(), order.end(), [](const std::string& a, const std::string& b) {
        auto rank = [](const std::string& s) {
            auto k = parse_source(s);
            return k ? static_cast<int>(*k) : 99;
        };
        return rank(a) < rank(b);
    });
    Table t{"projection",
            years.size() == 1 ? fmt::format("Projected emission growth in {}", *years.begin())
                              : std::string("Projected emission growth"),
            {"source"},
            {}};
    for (int b : bases) t.header.push_back(basis_label(b));
    for (const auto& s : order) {
        std::vector<std::string> row{s};
        for (int b : bases) {
            auto it = cells_by_source[s].find(b);
            row.push_back(it == cells_by_source[s].end() ? std::string() : it->second);
        }
        t.rows.push_back(std::move(row));
    }
    out.push_back(std::move(t));
}

void comparison_table(const CsvFile& f, std::vector<Table>& out) {
    Cells cells(f);
    std::vector<std::string> scenarios;
    std::map<int, std::map<std::string, std::pair<std::string, std::string>>> by_year;
    for (std::size_t i = 0; i < f.rows.size(); ++i) {
        const int y = cells.year(i, 0);
        cells.number(i, 3);
        if (cells.text(i, 2) != "total") continue;
        const std::string& scenario = cells.text(i, 1);
        if (std::find(scenarios.begin(), scenarios.end(), scenario) == scenarios.end()) {
            scenarios.push_back(scenario);
        }
        if (cells.maybe(i, 4)) by_year[y][scenario] = {cells.text(i, 3), cells.text(i, 4)};
        else by_year[y][scenario] = {cells.text(i, 3), ""};
    }
    cells.finish();
    Table t{"comparison", "Total emissions by scenario (MtCO2) and ratio to the baseline", {"year"}, {}};
    for (const auto& s : scenarios) {
        t.header.push_back(s + "_MtCO2");
        t.header.push_back(s + "_ratio");
    }
    for (const auto& [y, row_map] : by_year) {
        std::vector<std::string> row{std::to_string(y)};
        for (const auto& s : scenarios) {
            auto it = row_map.find(s);
            row.push_back(it == row_map.end() ? "" : it->second.first);
            row.push_back(it == row_map.end() ? "" : it->second.second);
        }
        t.rows.push_back(std::move(row));
    }
    out.push_back(std::move(t));
}

void echo_table(const CsvFile& f, std::size_t numeric_from, const std::string& name, const std::string& title,
                std::vector<Table>& out) {
    Cells cells(f);
    for (std::size_t i = 0; i < f.rows.size(); ++i) {
        for (std::size_t j = numeric_from; j < f.header.size(); ++j) cells.number(i, j);
    }
    cells.finish();
    Table t{name, title, f.header, f.rows};
    if (name == "contributions") {
        // key on factor.source so the long form stays unique
        t.header = {"factor", "share_percent"};
        t.rows.clear();
        for (const auto& r : f.rows) t.rows.push_back({r[0] + "." + r[1], r[2]});
    }
    out.push_back(std::move(t));
}

int cmd_report(const Context& ctx, const ReportFlags& f) {
    std::vector<std::string> inputs = f.in;
    Dataset aux;
    if (!f.gdp.empty() || !f.products.empty()) {
        aux = load_dataset({}, optional_path(f.gdp), optional_path(f.products));
        for (const auto* s : {&f.gdp, &f.products}) {
            if (!s->empty()) inputs.push_back(*s);
        }
    }

    std::vector<Table> tables;
    std::vector<CsvFile> projections;
    for (const auto& path : f.in) {
        CsvFile csv = read_csv(path);
        if (csv.header == kEmissionsHeader) {
            emissions_tables(csv, aux, !f.gdp.empty(), tables);
        } else if (csv.header == kProjectionHeader) {
            projections.push_back(std::move(csv));
        } else if (csv.header == kComparisonHeader) {
            comparison_table(csv, tables);
        } else if (csv.header == kBandHeader) {
            echo_table(csv, 2, "band", "Monte Carlo one-sigma band", tables);
        } else if (csv.header == kContributionsHeader) {
            echo_table(csv, 2, "contributions", "Contributions to uncertainty (% of variance)", tables);
        } else {
            throw ParseError({{path, 1, 0, "unrecognized header; expected a carbonledger output file"}});
        }
    }
    if (!projections.empty()) projection_table(projections, tables);
    if (!f.products.empty()) driver_table(aux, tables);

    Outputs o;
    o.files.push_back({f.out, f.format == "csv" ? render_csv(tables) : render_text(tables)});
    o.inputs = inputs;
    emit(ctx, o);
    return kOk;
}

// ---- verify ----------------------------------------------------------------

int cmd_verify(const Context& ctx, const std::vector<std::string>& manifests) {
    int rc = kOk;
    for (const auto& m : manifests) {
        const auto problems = verify_manifest(m);
        if (problems.empty()) {
            ctx.out << m << ": ok\n";
            continue;
        }
        rc = kRuntimeError;
        for (const auto& p : problems) ctx.err << m << ": " << p << '\n';
    }
    return rc;
}

/// Routes the library's log output to the command's error stream for the
/// duration of one run.
class LogScope {
public:
    LogScope(std::ostream& err, const std::string& level) : previous_(spdlog::default_logger()) {
        auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
        auto logger = std::make_shared<spdlog::logger>("carbonledger", sink);
        logger->set_pattern("%l: %v");
        logger->set_level(spdlog::level::from_str(level));
        spdlog::set_default_logger(logger);
    }
    ~LogScope() { spdlog::set_default_logger(previous_); }
    LogScope(const LogScope&) = delete;
    LogScope& operator=(const LogScope&) = delete;

private:
    std::shared_ptr<spdlog::logger> previous_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"National CO2 emission accounting and partial-year growth projection", "carbonledger"};
    app.set_version_flag("--version", std::string("carbonledger ") + CARBONLEDGER_VERSION);
    app.require_subcommand(1);
    std::string log_level = "warn";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
        ->envname(env("LOG_LEVEL"))
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

    CommonFlags common;

    ComputeFlags compute;
    auto* c_compute = app.add_subcommand("compute", "Annual emissions per source and total");
    add_common(c_compute, common);
    c_compute->add_option("--from", compute.from, "First year")->envname(env("FROM"));
    c_compute->add_option("--to", compute.to, "Last year")->envname(env("TO"));
    c_compute->add_option("--out", compute.out, "Output CSV (default: stdout)")->envname(env("OUT"));

    UncertaintyFlags unc;
    auto* c_unc = app.add_subcommand("uncertainty", "Monte Carlo band and per-input contributions");
    add_common(c_unc, common);
    c_unc->add_option("--year", unc.year, "Year (default: latest annual year)")->envname(env("YEAR"));
    c_unc->add_option("--draws", unc.draws, "Monte Carlo draws")->envname(env("DRAWS"));
    c_unc->add_option("--seed", unc.seed, "Random seed")->envname(env("SEED"));
    c_unc->add_option("--out", unc.out, "Band CSV (default: stdout)")->envname(env("OUT"));
    c_unc->add_option("--contributions", unc.contributions,
                      "Contributions CSV (default: <out stem>_contributions.csv)")
        ->envname(env("CONTRIBUTIONS"));

    ProjectFlags proj;
    auto* c_proj = app.add_subcommand("project", "Full-year emission growth from the first months");
    add_common(c_proj, common);
    c_proj->add_option("--monthly", proj.monthly, "Monthly flow CSV (repeatable)")
        ->envname(env("MONTHLY"))
        ->delimiter(',');
    c_proj->add_option("--year", proj.year, "Target year (default: latest year with monthly data)")
        ->envname(env("YEAR"));
    c_proj->add_option("--months", proj.months, "Months of the target year used as basis")
        ->envname(env("MONTHS"))
        ->check(CLI::Range(1, 11));
    c_proj->add_option("--draws", proj.draws, "Monte Carlo draws")->envname(env("DRAWS"));
    c_proj->add_option("--seed", proj.seed, "Random seed")->envname(env("SEED"));
    c_proj->add_flag("--pooled", proj.pooled, "Pool the regression across fuels");
    c_proj->add_option("--out", proj.out, "Output CSV (default: stdout)")->envname(env("OUT"));

    CompareFlags cmp;
    auto* c_cmp = app.add_subcommand("compare", "Emissions under several factor scenarios");
    add_common(c_cmp, common);
    c_cmp->add_option("--scenarios", cmp.scenarios, "Comma-separated scenario names")
        ->envname(env("SCENARIOS"))
        ->delimiter(',');
    c_cmp->add_option("--baseline", cmp.baseline, "Scenario the ratios refer to")->envname(env("BASELINE"));
    c_cmp->add_option("--from", cmp.from, "First year")->envname(env("FROM"));
    c_cmp->add_option("--to", cmp.to, "Last year")->envname(env("TO"));
    c_cmp->add_option("--out", cmp.out, "Output CSV (default: stdout)")->envname(env("OUT"));

    ReportFlags rep;
    auto* c_rep = app.add_subcommand("report", "Growth, intensity and driver tables from earlier outputs");
    c_rep->add_option("--in", rep.in, "Output file of compute, project, compare or uncertainty")
        ->required()
        ->envname(env("IN"))
        ->delimiter(',');
    c_rep->add_option("--format", rep.format, "text or csv")
        ->envname(env("FORMAT"))
        ->check(CLI::IsMember({"text", "csv"}));
    c_rep->add_option("--gdp", rep.gdp, "GDP and secondary-industry share CSV")->envname(env("GDP"));
    c_rep->add_option("--products", rep.products, "Industrial products CSV")->envname(env("PRODUCTS"));
    c_rep->add_option("--out", rep.out, "Output file (default: stdout)")->envname(env("OUT"));

    std::vector<std::string> manifests;
    auto* c_ver = app.add_subcommand("verify", "Recompute the digests recorded in run manifests");
    c_ver->add_option("manifest", manifests, "Manifest file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    LogScope logs(err, log_level);
    const Context ctx{args, out, err};
    try {
        if (c_compute->parsed()) return cmd_compute(ctx, common, compute);
        if (c_unc->parsed()) return cmd_uncertainty(ctx, common, unc);
        if (c_proj->parsed()) return cmd_project(ctx, common, proj);
        if (c_cmp->parsed()) return cmd_compare(ctx, common, cmp);
        if (c_rep->parsed()) return cmd_report(ctx, rep);
        if (c_ver->parsed()) return cmd_verify(ctx, manifests);
    } catch (const ParseError& e) {
        for (const auto& d : e.diagnostics()) err << "error: " << d.describe() << '\n';
        return kRuntimeError;
    } catch (const ValidationError& e) {
        err << "error: invalid input\n";
        for (const auto& v : e.violations()) err << "  " << v << '\n';
        return kRuntimeError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::usage ? kUsageError : kRuntimeError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kUsageError;
}

}  // namespace carbonledger::cli

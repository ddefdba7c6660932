#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include <unistd.h>

#include "carbonledger/domain.hpp"
#include "carbonledger/ingest.hpp"

namespace testing {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(CARBONLEDGER_SOURCE_DIR) / "data" / "bundled"; }

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

/// Fresh directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("carbonledger-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline carbonledger::FlowRecord fuel_record(carbonledger::Period p, carbonledger::SourceKind s, double prod,
                                            double imp = 0, double exp = 0, double stock = 0, double neu = 0) {
    using carbonledger::Quantity;
    auto r = carbonledger::FlowRecord::zero(p, s);
    const auto u = carbonledger::native_unit(s);
    r.production = Quantity(prod, u);
    r.imports = Quantity(imp, u);
    r.exports = Quantity(exp, u);
    r.stock_change = Quantity(stock, u);
    r.non_energy_use = Quantity(neu, u);
    return r;
}

/// Factor set with every source configured.
inline carbonledger::EmissionFactorSet full_factors(const std::string& name = "test") {
    using namespace carbonledger;
    EmissionFactorSet f = *builtin_preset("this-study");
    f.scenario_name = name;
    f.heating_value.set(SourceKind::oil, YearSeries(41.8));
    f.heating_value.set(SourceKind::natural_gas, YearSeries(0.0389));
    f.carbon_content[SourceKind::oil] = 20.0;
    f.carbon_content[SourceKind::natural_gas] = 15.3;
    f.oxidation[SourceKind::oil] = YearSeries(0.98);
    f.oxidation[SourceKind::natural_gas] = YearSeries(0.99);
    f.cement_factor = 0.0855;
    return f;
}

}  // namespace testing

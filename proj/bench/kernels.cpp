// Serial reference vs OpenMP kernels. Thread count for the parallel cases
// follows OMP_NUM_THREADS.

#include <filesystem>
#include <random>

#include <benchmark/benchmark.h>

#include "carbonledger/balance.hpp"
#include "carbonledger/ingest.hpp"
#include "carbonledger/nowcast.hpp"
#include "carbonledger/uncertainty.hpp"

using namespace carbonledger;

namespace {

const std::filesystem::path kData = std::filesystem::path(CARBONLEDGER_SOURCE_DIR) / "data" / "bundled";

struct Bundled {
    Dataset annual;
    Dataset full;
    ScenarioConfig cfg;
    YearModel model;

    static const Bundled& get() {
        static const Bundled b = [] {
            Bundled x;
            x.annual = load_dataset({kData / "flows_annual.csv"});
            x.full = load_dataset({kData / "flows_annual.csv", kData / "flows_monthly.csv"});
            x.cfg = load_scenario_config(kData / "scenarios.ini");
            x.model = YearModel::build(x.annual, x.cfg.default_set(), 2017);
            return x;
        }();
        return b;
    }
};

UncertaintySpec spec_with_stock() {
    auto s = Bundled::get().cfg.uncertainty;
    s.stock_change_abs_sigma[SourceKind::coal] = 30e6;
    s.stock_change_abs_sigma[SourceKind::oil] = 5e6;
    return s;
}

void BM_SimulateTotals_Reference(benchmark::State& state) {
    const auto& b = Bundled::get();
    const auto spec = spec_with_stock();
    const auto draws = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_totals_reference(b.model, spec, draws));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateTotals_Serial(benchmark::State& state) {
    const auto& b = Bundled::get();
    const auto spec = spec_with_stock();
    const auto draws = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_totals(b.model, spec, draws, ExecutionPolicy::serial()));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateTotals_Parallel(benchmark::State& state) {
    const auto& b = Bundled::get();
    const auto spec = spec_with_stock();
    const auto draws = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_totals(b.model, spec, draws, ExecutionPolicy::parallel()));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<FlowRecord> random_records(std::size_t n) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1e9);
    std::vector<FlowRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = kFuelSources[i % 3];
        auto r = FlowRecord::zero(Period::annual(2000 + static_cast<int>(i % 18)), s);
        const auto unit = native_unit(s);
        r.production = Quantity(u(rng), unit);
        r.imports = Quantity(u(rng) / 4, unit);
        r.exports = Quantity(u(rng) / 10, unit);
        out.push_back(r);
    }
    return out;
}

template <Execution Mode>
void BM_ApparentConsumptionAll(benchmark::State& state) {
    const auto records = random_records(static_cast<std::size_t>(state.range(0)));
    const auto& hv = Bundled::get().cfg.default_set().heating_value;
    const ExecutionPolicy policy = Mode == Execution::serial ? ExecutionPolicy::serial() : ExecutionPolicy::parallel();
    for (auto _ : state) benchmark::DoNotOptimize(apparent_consumption_all(records, hv, policy));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Execution Mode>
void BM_Nowcast(benchmark::State& state) {
    const auto& b = Bundled::get();
    NowcastOptions opt;
    opt.year = 2018;
    opt.months = 10;
    opt.draws = static_cast<std::size_t>(state.range(0));
    opt.seed = 42;
    opt.policy = Mode == Execution::serial ? ExecutionPolicy::serial() : ExecutionPolicy::parallel();
    for (auto _ : state) benchmark::DoNotOptimize(nowcast(b.full, b.cfg.default_set(), opt));
}

}  // namespace

BENCHMARK(BM_SimulateTotals_Reference)->Arg(1'000)->Arg(10'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateTotals_Serial)->Arg(1'000)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateTotals_Parallel)->Arg(1'000)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK_TEMPLATE(BM_ApparentConsumptionAll, Execution::serial)->Arg(10'000)->Arg(1'000'000);
BENCHMARK_TEMPLATE(BM_ApparentConsumptionAll, Execution::parallel)->Arg(10'000)->Arg(1'000'000)->UseRealTime();
BENCHMARK_TEMPLATE(BM_Nowcast, Execution::serial)->Arg(10'000)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Nowcast, Execution::parallel)->Arg(10'000)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

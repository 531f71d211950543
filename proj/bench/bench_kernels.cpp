// Serial reference vs OpenMP path for the hot kernels. The second benchmark
// argument selects the path: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include "wifitrack/ap_locator.hpp"
#include "wifitrack/dbscan.hpp"
#include "wifitrack/experiments.hpp"
#include "wifitrack/pairing.hpp"
#include "wifitrack/random.hpp"
#include "wifitrack/reconstructor.hpp"
#include "wifitrack/synthgen.hpp"

using namespace wifitrack;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

const TraceSet& traces() {
    static const TraceSet t = [] {
        WorldSpec spec;
        spec.n_users = 10;
        spec.n_days = 7;
        return simulate_sensors(generate_world(spec)).traces;
    }();
    return t;
}

const std::vector<PairedObservation>& observations() {
    static const auto obs = pair_observations(traces());
    return obs;
}

std::vector<GeoPoint> blob_points(std::size_t n) {
    Rng rng(1, 1);
    const LocalFrame frame(GeoPoint(55.6761, 12.5683));
    std::vector<GeoPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double cx = 400.0 * static_cast<double>(i % 7);
        pts.push_back(frame.to_geo({cx + rng.normal(0, 40), rng.normal(0, 40)}));
    }
    return pts;
}

void BM_Dbscan(benchmark::State& s) {
    const auto pts = blob_points(static_cast<std::size_t>(s.range(0)));
    for (auto _ : s) benchmark::DoNotOptimize(dbscan(pts, 100, 5, kEarthRadiusM, exec_of(s)));
    s.SetItemsProcessed(s.iterations() * s.range(0));
}
BENCHMARK(BM_Dbscan)->ArgsProduct({{2000, 20000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Pairing(benchmark::State& s) {
    const auto& t = traces();
    for (auto _ : s) benchmark::DoNotOptimize(pair_observations(t, {}, exec_of(s)));
}
BENCHMARK(BM_Pairing)->ArgsProduct({{0}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_BuildDatabase(benchmark::State& s) {
    const auto& obs = observations();
    for (auto _ : s) benchmark::DoNotOptimize(build_database(obs, {}, exec_of(s)));
    s.SetItemsProcessed(s.iterations() * static_cast<std::int64_t>(obs.size()));
}
BENCHMARK(BM_BuildDatabase)->ArgsProduct({{0}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Timelines(benchmark::State& s) {
    const auto db = build_database(observations());
    for (auto _ : s) benchmark::DoNotOptimize(build_timelines(traces(), db, kTenMinutesMs, exec_of(s)));
}
BENCHMARK(BM_Timelines)->ArgsProduct({{0}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_TopRoutersScenarios(benchmark::State& s) {
    const ExperimentContext ctx(traces(), {}, {}, exec_of(s));
    for (auto _ : s) benchmark::DoNotOptimize(run_all_scenarios(ctx, TopRouters{static_cast<std::size_t>(s.range(0))}));
}
BENCHMARK(BM_TopRoutersScenarios)->ArgsProduct({{20}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

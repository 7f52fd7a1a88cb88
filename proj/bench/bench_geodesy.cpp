// Serial vs OpenMP haversine kernels, plus the full ranking path.
//   ./bench_geodesy --benchmark_filter=Distances

#include "succor/distance_kernels.hpp"
#include "succor/geodesy.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

using namespace succor::geo;

namespace {

std::vector<GeoPoint> points(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lat(36.83, 36.89), lon(42.94, 43.03);
    std::vector<GeoPoint> out(n);
    for (auto& p : out) p = {lat(rng), lon(rng)};
    return out;
}

void BM_DistancesSerial(benchmark::State& state) {
    const auto targets = points(std::size_t(state.range(0)), 1);
    std::vector<double> out(targets.size());
    const GeoPoint origin{36.85126, 42.99551};
    for (auto _ : state) {
        kernels::distances_serial(origin, targets, 6371.0, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DistancesParallel(benchmark::State& state) {
    const auto targets = points(std::size_t(state.range(0)), 1);
    std::vector<double> out(targets.size());
    const GeoPoint origin{36.85126, 42.99551};
    for (auto _ : state) {
        kernels::distances_parallel(origin, targets, 6371.0, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PairwiseSerial(benchmark::State& state) {
    const auto a = points(std::size_t(state.range(0)), 2), b = points(a.size(), 3);
    std::vector<double> out(a.size());
    for (auto _ : state) {
        kernels::pairwise_serial(a, b, 6371.0, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PairwiseParallel(benchmark::State& state) {
    const auto a = points(std::size_t(state.range(0)), 2), b = points(a.size(), 3);
    std::vector<double> out(a.size());
    for (auto _ : state) {
        kernels::pairwise_parallel(a, b, 6371.0, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RankByDistance(benchmark::State& state) {
    const auto locs = points(std::size_t(state.range(0)), 4);
    std::vector<Facility> fleet;
    for (std::size_t i = 0; i < locs.size(); ++i)
        fleet.push_back({"E" + std::to_string(i), locs[i]});
    const GeoPoint origin{36.85126, 42.99551};
    for (auto _ : state)
        benchmark::DoNotOptimize(rank_by_distance(origin, fleet));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_DistancesSerial)->RangeMultiplier(8)->Range(64, 1 << 20);
BENCHMARK(BM_DistancesParallel)->RangeMultiplier(8)->Range(64, 1 << 20);
BENCHMARK(BM_PairwiseSerial)->Range(1 << 10, 1 << 20);
BENCHMARK(BM_PairwiseParallel)->Range(1 << 10, 1 << 20);
BENCHMARK(BM_RankByDistance)->RangeMultiplier(4)->Range(4, 1 << 14);
BENCHMARK_MAIN();

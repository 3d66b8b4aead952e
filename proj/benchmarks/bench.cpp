#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>
#include <vector>

#include "dta/bivariate.hpp"
#include "dta/ingest.hpp"
#include "dta/mvpbt.hpp"
#include "dta/numerics.hpp"
#include "dta/sroc.hpp"

namespace {

// the 17-study lymphangiography tables, embedded so benchmarks need no file I/O
constexpr long long kTP[] = {19, 8, 41, 5, 45, 8, 5, 15, 16, 4, 8, 10, 2, 7, 44, 8, 4};
constexpr long long kFN[] = {10, 2, 12, 2, 32, 2, 1, 11, 8, 2, 10, 4, 6, 7, 12, 1, 0};
constexpr long long kFP[] = {1, 9, 1, 1, 58, 6, 8, 17, 11, 8, 12, 4, 5, 10, 50, 3, 3};
constexpr long long kTN[] = {81, 13, 49, 18, 165, 32, 7, 52, 24, 25, 70, 55, 23, 30, 135, 37, 14};

std::vector<dta::StudyTable> tables() {
    std::vector<dta::StudyTable> t;
    for (int i = 0; i < 17; ++i)
        t.push_back({"s" + std::to_string(i), kTP[i], kFN[i], kFP[i], kTN[i]});
    return t;
}

std::vector<dta::TransformedStudy> studies() {
    return dta::transform_studies(
        dta::apply_correction(tables(), 0.5, dta::CorrectionPolicy::all));
}

void BM_transform(benchmark::State& state) {
    auto counts = dta::apply_correction(tables(), 0.5, dta::CorrectionPolicy::all);
    for (auto _ : state) benchmark::DoNotOptimize(dta::transform_studies(counts));
}
BENCHMARK(BM_transform);

void BM_reml_loglik(benchmark::State& state) {
    auto st = studies();
    auto fit = dta::fit_reitsma(st);
    for (auto _ : state) benchmark::DoNotOptimize(dta::reml_loglik(fit.sigma, st));
}
BENCHMARK(BM_reml_loglik);

void BM_fit_reitsma(benchmark::State& state) {
    auto st = studies();
    for (auto _ : state) benchmark::DoNotOptimize(dta::fit_reitsma(st));
}
BENCHMARK(BM_fit_reitsma);

void BM_msset2(benchmark::State& state) {
    auto st = studies();
    auto fit = dta::fit_reitsma(st);
    for (auto _ : state) benchmark::DoNotOptimize(dta::msset2(st, fit));
}
BENCHMARK(BM_msset2);

void BM_bootstrap_replicate(benchmark::State& state) {
    auto st = studies();
    auto fit = dta::fit_reitsma(st);
    std::uint64_t k = 0;
    for (auto _ : state) {
        dta::RngStream rng(1, ++k);
        benchmark::DoNotOptimize(dta::bootstrap_replicate(fit, st, rng, dta::SECovariate::total));
    }
}
BENCHMARK(BM_bootstrap_replicate);

void BM_msset3(benchmark::State& state) {
    auto st = studies();
    const long long B = state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(dta::msset3(st, B, 1, dta::SECovariate::total, 0));
    state.SetItemsProcessed(state.iterations() * B);
}
BENCHMARK(BM_msset3)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_auc(benchmark::State& state) {
    auto st = studies();
    auto p = dta::map_hsroc(dta::fit_reitsma(st));
    for (auto _ : state) benchmark::DoNotOptimize(dta::auc(p, int(state.range(0))));
}
BENCHMARK(BM_auc)->Arg(1000)->Arg(5000);

void BM_norm_quantile(benchmark::State& state) {
    double p = 0.0001;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dta::norm_quantile(p));
        p += 0.0001;
        if (p >= 1.0) p = 0.0001;
    }
}
BENCHMARK(BM_norm_quantile);

void BM_rng_normal(benchmark::State& state) {
    dta::RngStream rng(9, 0);
    for (auto _ : state) benchmark::DoNotOptimize(rng.next_normal());
}
BENCHMARK(BM_rng_normal);

} // namespace

BENCHMARK_MAIN();
